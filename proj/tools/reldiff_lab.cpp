// reldiff-lab: command line front end for the experiment verbs.
#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <utility>

#include "reldiff/error.hpp"
#include "reldiff/experiment.hpp"

namespace {

int threads_from_env() {
  const char* env = std::getenv("REL_DIFF_LAB_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) {
    std::cerr << "warning: ignoring REL_DIFF_LAB_THREADS=" << env << "\n";
    return 1;
  }
  return static_cast<int>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the relativistic diffusion equation with subordinated Gaussian data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "reldiff-lab 0.1.0");

  std::string config_path;
  reldiff::Overrides ov;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 0;
  int nu = 0;

  const std::pair<const char*, const char*> verbs[] = {
      {"validate", "check a config and report rank, regime and memory without running"},
      {"simulate", "synthesize initial data and write solution snapshots"},
      {"ladder", "Monte Carlo covariance and moment ladder toward a scaling limit"},
      {"lemma1", "classify small-frequency behaviour of spectral convolution powers"},
      {"diagrams", "diagram enumeration, regular-sum identity and non-regular inequality"},
      {"green", "convergence of the rescaled multiplier to its two scaling limits"},
  };
  for (const auto& [name, help] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "TOML experiment file (defaults apply when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed, overrides [seed] master");
    sub->add_option("--threads", threads, "worker threads (speed only)")->check(CLI::Range(1, 1024));
    sub->add_option("--out", out, "output directory, overrides [output] dir");
    if (std::string(name) == "diagrams") sub->add_option("--nu", nu, "half the number of levels")->check(CLI::Range(1, 4));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : reldiff::kExitValidation;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    const reldiff::Verb verb = reldiff::verb_from_string(chosen->get_name());
    reldiff::ExperimentConfig config = config_path.empty() ? reldiff::ExperimentConfig{} : reldiff::load_config(config_path);
    if (chosen->count("--seed")) ov.seed = seed;
    if (chosen->count("--out")) ov.out = out;
    if (chosen->get_option_no_throw("--nu") && chosen->count("--nu")) ov.nu = nu;
    ov.threads = chosen->count("--threads") ? threads : threads_from_env();
    reldiff::apply_overrides(config, ov);

    const reldiff::RunOutcome res = reldiff::run_verb(verb, config, ov.threads, std::cout);
    for (const auto& f : res.failures) {
      std::cerr << (res.exit_code == reldiff::kExitCheckFailed ? "check failed: " : "error: ") << f << "\n";
    }
    return res.exit_code;
  } catch (const reldiff::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return reldiff::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return reldiff::kExitNumerical;
  }
}
