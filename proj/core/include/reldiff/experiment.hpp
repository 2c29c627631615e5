#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "reldiff/config.hpp"

namespace reldiff {

enum class Verb { validate, simulate, ladder, lemma1, diagrams, green };
std::string to_string(Verb verb);
Verb verb_from_string(const std::string& name);

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitCheckFailed = 3;

/// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> nu;
  /// Speed only; never recorded in any artifact.
  int threads = 1;
};

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

struct Artifact {
  std::string name;
  std::uint64_t hash = 0;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<Artifact> artifacts;
  /// Checks that failed (exit code 3), or the error message (codes 1 and 2).
  std::vector<std::string> failures;
};

/// Runs one verb and writes its artifacts plus manifest.json (config hash, seed,
/// resolved config, artifact hashes) into config.output_dir. On an exception a FAILED
/// marker holding the message is written next to whatever was produced. Progress and
/// summaries go to `log`.
RunOutcome run_verb(Verb verb, const ExperimentConfig& config, int threads, std::ostream& log);

/// Hex form of fnv1a64 over to_toml(config) with the output directory blanked.
std::string config_hash(const ExperimentConfig& config);

}  // namespace reldiff
