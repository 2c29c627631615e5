#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace reldiff {

/// Counter-based Philox-4x32-10. Stateless: the same (key, counter) always yields
/// the same block, so draws do not depend on thread scheduling.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  explicit Philox4x32(std::uint64_t key) : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}
  Block operator()(Block counter) const;

 private:
  std::array<std::uint32_t, 2> key_;
};

/// Identifies one independent random stream.
struct SeedSpec {
  std::uint64_t master = 0;
  std::uint32_t replicate = 0;
  std::uint32_t stream = 0;
};

/// Uniform in the open interval (0,1) with 52 random bits.
double uniform_open(std::uint32_t hi, std::uint32_t lo);

/// Two independent standard normals attached to `index` of the stream.
std::pair<double, double> normal_pair(const SeedSpec& seed, std::uint64_t index);

}  // namespace reldiff
