#pragma once

#include <array>
#include <string>
#include <vector>

#include "reldiff/green.hpp"
#include "reldiff/synth.hpp"

namespace reldiff {

/// u(t) = F^{-1}[G^(t, lambda) F u0] on the periodic grid. Never throws on slow
/// multiplier decay; see aliasing_check.
FieldGrid solve(const FieldGrid& u0, const ModelParams& params, double t);

/// Spectral (trigonometric) interpolation of solve(u0, params, t) at arbitrary
/// points of [0, L)^n; exact for band-limited grid data.
std::vector<double> solve_at_points(const FieldGrid& u0, const ModelParams& params, double t,
                                    const std::vector<std::array<double, 2>>& points);

enum class AliasStatus { ok, warn, fail };
std::string to_string(AliasStatus status);

struct AliasReport {
  AliasStatus status = AliasStatus::ok;
  /// G^(t, pi / dx): the multiplier left at the Nyquist frequency.
  double nyquist_multiplier = 0.0;
};

/// warn above 1e-3, fail above 1e-1.
AliasReport aliasing_check(const ModelParams& params, double t, const GridSpec& grid);

}  // namespace reldiff
