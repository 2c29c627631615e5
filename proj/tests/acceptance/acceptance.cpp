// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
#include <CLI11.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "reldiff/config.hpp"
#include "reldiff/diagrams.hpp"
#include "reldiff/experiment.hpp"
#include "reldiff/green.hpp"
#include "reldiff/hermite.hpp"
#include "reldiff/scaling.hpp"
#include "reldiff/synth.hpp"

using namespace reldiff;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::vector<std::string> details;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1: multiplier exactness

Verdict multiplier_exactness() {
  using mp50 = boost::multiprecision::cpp_dec_float_50;
  Verdict v;
  std::mt19937_64 gen(20261015);
  std::uniform_real_distribution<double> ua(0.01, 1.99), um(0.0, 10.0), ut(0.0, 20.0), ul(0.0, 50.0);
  double worst = 0.0, worst_semi = 0.0, worst_zero = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double a = ua(gen), m = um(gen), t = ut(gen), l = ul(gen);
    const ModelParams p(1, a, m);
    const mp50 e = pow(pow(mp50(m), 2 / mp50(a)) + mp50(l) * mp50(l), mp50(a) / 2) - mp50(m);
    const double want = static_cast<double>(exp(-mp50(t) * e));
    worst = std::max(worst, std::abs(green_hat(p, t, l) - want));
    const double s = ut(gen);
    const double lhs = green_hat(p, t, l) * green_hat(p, s, l), rhs = green_hat(p, t + s, l);
    if (rhs > 1e-250) worst_semi = std::max(worst_semi, std::abs(lhs - rhs) / rhs);
    worst_zero = std::max(worst_zero, std::abs(green_hat(p, t, 0.0) - 1.0));
  }
  v.details.push_back(fmt("max |green_hat - 50-digit oracle| = %.3e over 10^4 draws", worst));
  v.details.push_back(fmt("max semigroup relative defect = %.3e, max |G(t,0) - 1| = %.3e", worst_semi, worst_zero));
  v.pass = worst <= 1e-12 && worst_semi <= 1e-12 && worst_zero <= 1e-12;
  return v;
}

// ---- 2: two-scale multiplier limits

Verdict two_scale_limits() {
  Verdict v;
  const ModelParams p(1, 1.0, 1.0);
  const std::vector<double> Ts{1e2, 1e3, 1e4}, eps{1e-2, 1e-3, 1e-4};
  const double lmax = 4.0;
  const auto large = large_scale_convergence(p, 1.0, Ts, lmax, 100);
  const auto small = small_scale_convergence(p, 1.0, eps, lmax, 100);
  bool ok = true;
  for (std::size_t i = 0; i < 3; ++i) {
    v.details.push_back(fmt("T = %-6g sup err %.4e  T*err %.4f | eps = %-6g sup err %.4e", large[i].scale,
                            large[i].sup_error, large[i].scale * large[i].sup_error, small[i].scale,
                            small[i].sup_error));
    if (i > 0) {
      ok = ok && large[i].sup_error < large[i - 1].sup_error && small[i].sup_error < small[i - 1].sup_error;
      const double ratio = (large[i].scale * large[i].sup_error) / (large[i - 1].scale * large[i - 1].sup_error);
      ok = ok && ratio >= 0.5 && ratio <= 2.0;
    }
  }
  double gap = 0.0;
  for (double m2 : {0.0, 0.5, 2.0, 4.0}) gap = std::max(gap, small_scale_mass_gap(1, 1.0, 1.0, m2, 1e-4, 1.0, lmax, 100));
  v.details.push_back(fmt("max mass gap at eps = 1e-4 (mass 1 vs 0, 0.5, 2, 4) = %.3e", gap));
  v.pass = ok && gap < 1e-3;
  return v;
}

// ---- 3 and 4: ladders

struct LadderRun {
  LadderReport report;
  double seconds = 0.0;
};

LadderRun run_preset(const std::string& name, int threads) {
  const auto cfg = load_config(std::string(RELDIFF_PRESET_DIR) + "/" + name + ".toml");
  validate_config(cfg, threads);
  LadderConfig lc = cfg.ladder;
  lc.threads = threads;
  const auto t0 = std::chrono::steady_clock::now();
  LadderRun r{run_ladder(lc, cfg.probes, make_density(cfg), make_subordinator(cfg), make_params(cfg)), 0.0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void describe_rungs(const LadderReport& rep, Verdict& v) {
  for (const auto& s : rep.scales) {
    v.details.push_back(fmt("  scale %-10.6g err %.4f +- %.4f (bias %.4f)  r3 %+.3f +- %.3f  r4 %.3f +- %.3f", s.scale,
                            s.frobenius_rel_err.value, s.frobenius_rel_err.se, s.bias_frobenius, s.r3.value, s.r3.se,
                            s.r4.value, s.r4.se));
  }
}

Verdict gaussian_convergence(int threads) {
  Verdict v;
  v.pass = true;
  for (const char* name : {"large_B", "small_B"}) {
    const auto run = run_preset(name, threads);
    const auto& rep = run.report;
    const auto& last = rep.scales.back();
    const bool dec = rep.error_decreasing;
    const bool err = last.frobenius_rel_err.value < 0.15;
    const bool r3 = std::abs(last.r3.value) < 3 * last.r3.se;
    const bool r4 = std::abs(last.r4.value - 1.0) < std::max(0.1, 3 * last.r4.se);
    v.details.push_back(fmt("%s (sigma = %.6f, %.1f s):", name, rep.sigma ? rep.sigma->sigma : 0.0, run.seconds));
    describe_rungs(rep, v);
    v.details.push_back(fmt("  error decreasing %s | last err < 0.15 %s | |r3| < 3 SE %s | |r4 - 1| < max(0.1, 3 SE) %s",
                            dec ? "yes" : "NO", err ? "yes" : "NO", r3 ? "yes" : "NO", r4 ? "yes" : "NO"));
    v.pass = v.pass && dec && err && r3 && r4;
  }
  return v;
}

Verdict non_gaussianity(int threads) {
  Verdict v;
  v.pass = true;
  for (const char* name : {"large_C", "small_C"}) {
    const auto run = run_preset(name, threads);
    const auto& rep = run.report;
    const auto& last = rep.scales.back();
    v.details.push_back(fmt("%s (%.1f s):", name, run.seconds));
    describe_rungs(rep, v);
    if (!rep.oracle) {
      v.details.push_back("  no fourth-moment oracle for this configuration");
      v.pass = false;
      continue;
    }
    const double frac = rep.config.oracle_threshold_fraction;
    const double se = std::hypot(last.r4.se, frac * rep.oracle->resolution_error);
    const double margin = last.r4.value - 1.0 - rep.r4_threshold;
    const bool cov = last.frobenius_rel_err.value < 0.2;
    const bool kurt = margin >= se;
    v.details.push_back(fmt("  covariance error budget: MC SE %.4f, torus bias %.4f, chaos tail majorant %.3e",
                            last.frobenius_rel_err.se, last.bias_frobenius, rep.truncation_tail));
    v.details.push_back(fmt("  oracle excess %.4f (resolution %.1e), threshold %.4f; r4 - 1 - threshold = %.4f vs SE %.4f",
                            rep.oracle->excess, rep.oracle->resolution_error, rep.r4_threshold, margin, se));
    v.details.push_back(fmt("  covariance within 20%% %s | excess kurtosis above threshold by >= SE %s", cov ? "yes" : "NO",
                            kurt ? "yes" : "NO"));
    v.pass = v.pass && cov && kurt;
  }
  return v;
}

// ---- 5: convolution-power trichotomy

Verdict lemma1_trichotomy(const fs::path& work) {
  Verdict v;
  ExperimentConfig c;
  c.lemma1.kappas = {0.2, 0.25, 0.3, 0.5, 0.7, 1.0};
  c.lemma1.ks = {2, 3, 4};
  c.lemma1.sup_kmax = 6;
  c.output_dir = (work / "lemma1").string();
  c.svg = false;
  std::ostringstream log;
  const auto res = run_verb(Verb::lemma1, c, 1, log);
  std::istringstream in(log.str());
  std::string line;
  std::getline(in, line);
  int cells = 0;
  while (std::getline(in, line)) ++cells;
  v.details.push_back(fmt("%d (kappa, k) cells, sup chains up to k = 6; table in %s", cells, c.output_dir.c_str()));
  for (const auto& f : res.failures) v.details.push_back("  " + f);
  v.pass = res.exit_code == kExitOk;
  return v;
}

// ---- 6: diagrams

void sorted_orders(int lo, int hi, int len, int max_vertices, Order& cur, std::vector<Order>& out) {
  if (static_cast<int>(cur.size()) == len) {
    int total = 0;
    for (int l : cur) total += l;
    if (total % 2 == 0 && total <= max_vertices) out.push_back(cur);
    return;
  }
  for (int l = cur.empty() ? lo : cur.back(); l <= hi; ++l) {
    cur.push_back(l);
    sorted_orders(lo, hi, len, max_vertices, cur, out);
    cur.pop_back();
  }
}

Verdict diagram_identities() {
  Verdict v;
  bool ok = true;
  std::mt19937 gen(7);
  std::uniform_int_distribution<int> num(0, 60), den(1, 12), len(1, 4), mm(1, 3);
  int identities = 0;
  for (int nu = 1; nu <= 3; ++nu) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<Rational> w;
      const int L = len(gen);
      for (int i = 0; i < L; ++i) w.push_back(Rational(num(gen), den(gen)));
      const int m = mm(gen);
      const auto r = regular_sum(w, m, nu);
      ++identities;
      if (r.residual != 0) {
        ok = false;
        v.details.push_back("  nonzero residual " + r.residual.str());
      }
      if (2 * nu * (m + L - 1) <= kMaxDiagramVertices && nu <= 2) {
        if (regular_sum_bruteforce(w, m, nu).enumeration != r.enumeration) {
          ok = false;
          v.details.push_back("  structural and brute-force sums differ");
        }
      }
    }
  }
  v.details.push_back(fmt("%d regular-sum identities (nu <= 3, N0 - m <= 3) with zero residual: %s", identities,
                          ok ? "yes" : "NO"));
  const std::vector<std::pair<Order, std::uint64_t>> counts{{{2, 2}, 2}, {{1, 1, 1, 1}, 3}, {{2, 2, 2}, 8}};
  for (const auto& [o, want] : counts) {
    const auto got = count_complete(o);
    v.details.push_back(fmt("count %s = %llu (expected %llu)", to_string(o).c_str(), static_cast<unsigned long long>(got),
                            static_cast<unsigned long long>(want)));
    ok = ok && got == want;
  }
  // Non-regular inequality over every order with level sizes 1..4, 2..6 levels and at
  // most 18 vertices, plus a few 20-vertex orders with larger levels. The full 20-vertex
  // sweep is about 2 minutes on one core.
  std::vector<Order> orders;
  for (int p = 2; p <= 6; ++p) {
    Order cur;
    sorted_orders(1, 4, p, 18, cur, orders);
  }
  for (const Order& o : std::vector<Order>{{2, 3, 3, 6, 6}, {4, 5, 5, 6}, {10, 10}}) {
    orders.push_back(o);
  }
  std::uint64_t diagrams = 0, nonregular = 0;
  std::optional<Rational> min_margin;
  for (const Order& o : orders) {
    const auto c = nonregular_inequality_check(o);
    diagrams += c.complete;
    nonregular += c.nonregular;
    if (c.min_margin && (!min_margin || *c.min_margin < *min_margin)) min_margin = c.min_margin;
    if (!c.ok) {
      ok = false;
      v.details.push_back("  inequality violated for " + to_string(o));
    }
  }
  v.details.push_back(fmt("inequality over %zu orders: %llu complete, %llu non-regular diagrams, min margin %s",
                          orders.size(), static_cast<unsigned long long>(diagrams),
                          static_cast<unsigned long long>(nonregular), min_margin ? min_margin->str().c_str() : "none"));
  v.pass = ok;
  return v;
}

// ---- 7: synthesis fidelity

Verdict synthesis_fidelity() {
  Verdict v;
  const auto sd = SpectralDensity::normalized(1, 1.0, BFamily::exponential);
  const GridSpec g{1, 4096, 1024.0};
  const auto spec = lattice_spectrum(sd, g);
  std::vector<FieldGrid> reps;
  for (std::uint32_t r = 0; r < 200; ++r) reps.push_back(sample_gaussian_field(spec, g, {20261015, r, 0}));
  const long step = std::lround(1.0 / g.spacing());
  const auto est = estimate_covariance(reps, {{0, 0}, {step, 0}, {2 * step, 0}}, 0.0);
  bool ok = true;
  for (int k = 0; k < 3; ++k) {
    const double want = 1.0 / (1.0 + k * k);
    const double z = (est.value[k] - want) / est.standard_error[k];
    v.details.push_back(fmt("R(%d): %.5f +- %.5f vs %.5f (%.2f SE)", k, est.value[k], est.standard_error[k], want, z));
    ok = ok && std::abs(z) < 3.0;
  }
  // E He_i He_j / sqrt(i! j!) = delta_ij; spatial means per replicate, SE across replicates.
  double worst = 0.0;
  for (int i = 0; i <= 3; ++i) {
    for (int j = i; j <= 3; ++j) {
      if (i == 0 && j == 0) continue;
      const double norm = std::sqrt(std::tgamma(i + 1.0) * std::tgamma(j + 1.0));
      double s = 0.0, s2 = 0.0;
      for (const auto& r : reps) {
        double a = 0.0;
        for (double z : r.values) a += hermite_eval(i, z) * hermite_eval(j, z) / norm;
        a /= static_cast<double>(r.values.size());
        s += a;
        s2 += a * a;
      }
      const double n = static_cast<double>(reps.size());
      const double mean = s / n;
      const double se = std::sqrt(std::max(s2 / n - mean * mean, 0.0) / (n - 1));
      const double z = (mean - (i == j ? 1.0 : 0.0)) / se;
      worst = std::max(worst, std::abs(z));
    }
  }
  v.details.push_back(fmt("Hermite orthogonality for l <= 3: worst deviation %.2f SE", worst));
  v.pass = ok && worst < 4.0;
  return v;
}

// ---- 8: determinism

Verdict determinism(const fs::path& work, int threads) {
  Verdict v;
  auto cfg = load_config(std::string(RELDIFF_PRESET_DIR) + "/large_B.toml");
  cfg.svg = false;
  std::map<int, std::string> json, csv;
  for (int t : {1, threads}) {
    cfg.output_dir = (work / ("determinism_t" + std::to_string(t))).string();
    std::ostringstream log;
    const auto res = run_verb(Verb::ladder, cfg, t, log);
    if (res.exit_code != kExitOk && res.exit_code != kExitCheckFailed) {
      v.details.push_back("ladder run failed: " + res.failures.front());
      return v;
    }
    std::ifstream j(fs::path(cfg.output_dir) / "ladder.json", std::ios::binary), c(fs::path(cfg.output_dir) / "ladder.csv");
    std::stringstream sj, sc;
    sj << j.rdbuf();
    sc << c.rdbuf();
    json[t] = sj.str();
    csv[t] = sc.str();
  }
  v.pass = json[1] == json[threads] && csv[1] == csv[threads] && !json[1].empty();
  v.details.push_back(fmt("ladder.json %zu bytes and ladder.csv identical for --threads 1 and %d: %s", json[1].size(),
                          threads, v.pass ? "yes" : "NO"));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> known;
  std::vector<int> only;
  int threads = 4;
  std::string work = "acceptance_work";
  app.add_option("--known-failure", known, "criteria whose failure is documented and does not fail the run");
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--threads", threads, "worker threads for the ladder runs")->check(CLI::Range(1, 256));
  app.add_option("--work-dir", work, "scratch directory for artifacts");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"multiplier exactness", multiplier_exactness},
      {"two-scale multiplier limits", two_scale_limits},
      {"Gaussian covariance convergence (B regimes)", [&] { return gaussian_convergence(threads); }},
      {"non-Gaussian limits (C regimes)", [&] { return non_gaussianity(threads); }},
      {"convolution-power trichotomy", [&] { return lemma1_trichotomy(work); }},
      {"diagram identities", diagram_identities},
      {"synthesis fidelity", synthesis_fidelity},
      {"determinism across thread counts", [&] { return determinism(work, threads); }},
  };
  const std::set<int> known_set(known.begin(), known.end());
  int unexpected = 0, failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.details.push_back(std::string("exception: ") + e.what());
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << criteria[i].first
              << fmt(" (%.1f s)", sec) << (!v.pass && known_set.count(id) ? " [known failure]" : "") << "\n";
    for (const auto& d : v.details) std::cout << "    " << d << "\n";
    std::cout.flush();
    if (!v.pass) {
      ++failed;
      if (!known_set.count(id)) ++unexpected;
    }
  }
  std::cout << "summary: " << failed << " failed, " << unexpected << " unexpected\n";
  return unexpected == 0 ? 0 : kExitCheckFailed;
}
