#include "reldiff/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <ostream>
#include <sstream>

#include "reldiff/diagrams.hpp"
#include "reldiff/error.hpp"
#include "reldiff/plotting.hpp"
#include "reldiff/solver.hpp"

namespace reldiff {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string to_string(Verb verb) {
  switch (verb) {
    case Verb::validate: return "validate";
    case Verb::simulate: return "simulate";
    case Verb::ladder: return "ladder";
    case Verb::lemma1: return "lemma1";
    case Verb::diagrams: return "diagrams";
    case Verb::green: return "green";
  }
  return "?";
}

Verb verb_from_string(const std::string& name) {
  for (Verb v : {Verb::validate, Verb::simulate, Verb::ladder, Verb::lemma1, Verb::diagrams, Verb::green}) {
    if (to_string(v) == name) return v;
  }
  throw ValidationError("unknown verb '" + name + "'");
}

void apply_overrides(ExperimentConfig& config, const Overrides& o) {
  if (o.seed) {
    config.master_seed = *o.seed;
    config.ladder.master_seed = *o.seed;
  }
  if (o.out) config.output_dir = *o.out;
  if (o.nu) config.diagrams.nu = *o.nu;
}

std::string config_hash(const ExperimentConfig& config) {
  // The output location never changes a number.
  ExperimentConfig c = config;
  c.output_dir.clear();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_toml(c))));
  return buf;
}

namespace {

class Writer {
 public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) {}

  void put(const std::string& name, const std::string& bytes) {
    std::ofstream out(dir_ / name, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ValidationError("cannot write " + (dir_ / name).string());
    artifacts.push_back({name, fnv1a64(bytes)});
  }

  void plot(const std::string& stem, const std::vector<Series>& series, const ChartOptions& chart, bool svg) {
    for (const auto& s : series) {
      std::ostringstream os;
      write_plot_data(os, s, chart.x_label, chart.y_label);
      put(stem + (series.size() > 1 ? "_" + s.label : "") + ".dat", os.str());
    }
    if (svg) put(stem + ".svg", render_svg(series, chart));
  }

  const fs::path& dir() const { return dir_; }
  std::vector<Artifact> artifacts;

 private:
  fs::path dir_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- validate

void run_validate(const ExperimentConfig& c, int threads, Writer& w, std::ostream& log, RunOutcome&) {
  const ValidationReport rep = validate_config(c, threads);
  const std::string text = to_json(rep);
  w.put("validate.json", text);
  log << text;
}

// ---- simulate

void run_simulate(const ExperimentConfig& c, Writer& w, std::ostream& log, RunOutcome&) {
  const auto& s = c.simulate;
  if (s.replicates < 1) throw ValidationError("simulate.replicates must be >= 1");
  if (s.format != "binary" && s.format != "csv") throw ValidationError("simulate.format must be binary or csv");
  if (s.format == "csv" && c.model.dim != 1) throw ValidationError("simulate.format = csv needs dim = 1");
  for (double t : s.times) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("simulate.times must be finite and >= 0");
  }
  const ModelParams params = make_params(c);
  const SpectralDensity sd = make_density(c);
  const Subordinator sub = make_subordinator(c);
  GridSpec grid = s.grid;
  grid.dim = c.model.dim;
  grid.validate();
  if (s.n0 < sub.rank()) throw ValidationError("simulate.n0 must be >= the Hermite rank");

  const std::vector<double> spectrum = lattice_spectrum(sd, grid);
  json summary;
  summary["grid"] = {{"dim", grid.dim}, {"points", grid.points}, {"box_length", grid.box_length}};
  summary["times"] = s.times;
  summary["alias"] = json::array();
  for (double t : s.times) {
    if (t == 0.0) continue;
    const AliasReport a = aliasing_check(params, t, grid);
    summary["alias"].push_back({{"t", t}, {"status", to_string(a.status)}, {"nyquist_multiplier", a.nyquist_multiplier}});
    if (a.status == AliasStatus::fail) {
      throw NumericalError("grid does not resolve the multiplier at t = " + fmt(t) + "; refine simulate.points");
    }
  }
  summary["fields"] = json::array();
  const std::string ext = s.format == "binary" ? ".bin" : ".csv";
  for (int r = 0; r < s.replicates; ++r) {
    const FieldGrid zeta = sample_gaussian_field(spectrum, grid, SeedSpec{c.master_seed, static_cast<std::uint32_t>(r), 0});
    const FieldGrid u0 = make_initial_data(zeta, sub, s.n0);
    for (std::size_t k = 0; k < s.times.size(); ++k) {
      const FieldGrid u = s.times[k] == 0.0 ? u0 : solve(u0, params, s.times[k]);
      char name[64];
      std::snprintf(name, sizeof name, "u_r%04d_t%02zu", r, k);
      std::ostringstream os;
      if (s.format == "binary") {
        write_field_binary(os, u);
      } else {
        write_field_csv(os, u);
      }
      w.put(name + ext, os.str());
      double mean = 0.0, sq = 0.0;
      for (double v : u.values) mean += v;
      mean /= static_cast<double>(u.values.size());
      for (double v : u.values) sq += (v - mean) * (v - mean);
      summary["fields"].push_back({{"file", name + ext},
                                   {"replicate", r},
                                   {"t", s.times[k]},
                                   {"spatial_mean", mean},
                                   {"spatial_variance", sq / static_cast<double>(u.values.size())}});
    }
  }
  w.put("simulate.json", summary.dump(2) + "\n");
  log << "simulate: " << s.replicates << " replicates x " << s.times.size() << " times written\n";
}

// ---- ladder

void run_ladder_verb(const ExperimentConfig& c, int threads, Writer& w, std::ostream& log, RunOutcome& out) {
  validate_config(c, threads);
  LadderConfig lc = c.ladder;
  lc.threads = threads;
  const LadderReport rep = run_ladder(lc, c.probes, make_density(c), make_subordinator(c), make_params(c));
  w.put("ladder.json", ladder_report_json(rep));
  w.put("ladder.csv", ladder_report_csv(rep));

  const bool large = is_large(rep.regime);
  Series err{"error", {}, {}}, r4{"r4", {}, {}};
  for (const auto& s : rep.scales) {
    const double x = large ? s.scale : 1.0 / s.scale;
    err.x.push_back(x);
    err.y.push_back(s.frobenius_rel_err.value);
    r4.x.push_back(x);
    r4.y.push_back(s.r4.value);
  }
  const std::string xl = large ? "T" : "1/eps";
  w.plot("ladder_error", {err}, {"relative Frobenius error", xl, "error", true, true}, c.svg);
  w.plot("ladder_r4", {r4}, {"fourth moment ratio", xl, "r4", true, false}, c.svg);

  log << "ladder " << to_string(rep.regime) << ":\n";
  for (const auto& s : rep.scales) {
    char line[200];
    std::snprintf(line, sizeof line, "  scale %-10.6g err %.4f +- %.4f  bias %.4f  r3 %.3f +- %.3f  r4 %.3f +- %.3f\n",
                  s.scale, s.frobenius_rel_err.value, s.frobenius_rel_err.se, s.bias_frobenius, s.r3.value, s.r3.se,
                  s.r4.value, s.r4.se);
    log << line;
  }
  for (const auto& n : rep.notes) log << "  note: " << n << "\n";
  if (!rep.error_decreasing) out.failures.push_back("covariance error does not decrease along the ladder");
}

// ---- lemma1

void run_lemma1(const ExperimentConfig& c, Writer& w, std::ostream& log, RunOutcome& out) {
  const auto& s = c.lemma1;
  if (s.kappas.empty() || s.ks.empty()) throw ValidationError("lemma1.kappas and lemma1.ks must be non-empty");
  for (int k : s.ks) {
    if (k < 1) throw ValidationError("lemma1.ks entries must be >= 1");
  }
  FrequencyGrid grid = s.grid;
  grid.dim = c.model.dim;
  grid.validate();
  const int n = c.model.dim;
  const int kmax = std::max(*std::max_element(s.ks.begin(), s.ks.end()), s.sup_kmax);

  json doc;
  doc["cells"] = json::array();
  doc["sup_monotonicity"] = json::array();
  std::string csv = "kappa,k,predicted,regime,exponent_estimate,expected_exponent,fit_r2,loglog_slope,sup_Bk\n";
  std::vector<Series> slopes;
  for (double kappa : s.kappas) {
    const SpectralDensity sd = SpectralDensity::normalized(n, kappa, c.spectrum.family, c.spectrum.decay);
    const auto powers = convolution_powers(sd, kmax, grid);
    Series ser{"kappa" + fmt(kappa), {}, {}};
    for (int k : s.ks) {
      const Lemma1Report r = lemma1_regime(powers[k - 1], kappa);
      const double expected = k * kappa - n;
      json cell{{"kappa", kappa},
                {"k", k},
                {"predicted", to_string(r.predicted)},
                {"regime", to_string(r.regime)},
                {"exponent_estimate", r.exponent_estimate},
                {"expected_exponent", expected},
                {"fit_r2", r.fit_r2},
                {"loglog_slope", r.loglog_slope},
                {"log_fit_r2", r.log_fit_r2},
                {"sup_Bk_estimate", r.sup_Bk_estimate},
                {"value_at_origin", r.value_at_origin}};
      doc["cells"].push_back(cell);
      csv += fmt(kappa) + "," + std::to_string(k) + "," + to_string(r.predicted) + "," + to_string(r.regime) + "," +
             fmt(r.exponent_estimate) + "," + fmt(expected) + "," + fmt(r.fit_r2) + "," + fmt(r.loglog_slope) + "," +
             fmt(r.sup_Bk_estimate) + "\n";
      if (r.regime != r.predicted) {
        out.failures.push_back("kappa = " + fmt(kappa) + ", k = " + std::to_string(k) + ": predicted " +
                               to_string(r.predicted) + ", observed " + to_string(r.regime));
      } else if (r.predicted == Lemma1Regime::power && std::abs(r.exponent_estimate - expected) > 0.05) {
        out.failures.push_back("kappa = " + fmt(kappa) + ", k = " + std::to_string(k) + ": exponent " +
                               fmt(r.exponent_estimate) + " vs " + fmt(expected));
      }
      if (r.predicted == Lemma1Regime::power) {
        ser.x.push_back(k);
        ser.y.push_back(r.exponent_estimate);
      }
    }
    if (!ser.x.empty()) slopes.push_back(ser);
    // Chain from the first k above n / kappa up to sup_kmax.
    const int k2 = static_cast<int>(std::floor(n / kappa + 1e-12)) + 1;
    if (s.sup_kmax > k2) {
      const SupMonotonicity m = sup_monotonicity_check(powers, kappa, s.sup_kmax, k2);
      json jm{{"kappa", kappa}, {"k1", s.sup_kmax}, {"k2", k2}, {"ok", m.ok && m.chain_ok},
              {"sup_k1", m.sup_k1}, {"sup_k2", m.sup_k2}};
      jm["offending_k"] = m.offending_k ? json(*m.offending_k) : json(nullptr);
      doc["sup_monotonicity"].push_back(jm);
      if (!(m.ok && m.chain_ok)) out.failures.push_back("sup monotonicity fails for kappa = " + fmt(kappa));
    }
  }
  w.put("lemma1.json", doc.dump(2) + "\n");
  w.put("lemma1.csv", csv);
  if (!slopes.empty()) w.plot("lemma1_exponent", slopes, {"fitted exponent of f^{*k}", "k", "exponent"}, c.svg);
  log << csv;
}

// ---- diagrams

// Sorted level sequences in {m..n0}^{len} with an even vertex total.
void sorted_orders(int m, int n0, int len, Order& cur, std::vector<Order>& out) {
  if (static_cast<int>(cur.size()) == len) {
    int total = 0;
    for (int l : cur) total += l;
    if (total % 2 == 0 && total <= kMaxDiagramVertices) out.push_back(cur);
    return;
  }
  for (int l = cur.empty() ? m : cur.back(); l <= n0; ++l) {
    cur.push_back(l);
    sorted_orders(m, n0, len, cur, out);
    cur.pop_back();
  }
}

// Regular diagrams predicted by the multiplicity formula (0 if a size occurs an odd number of times).
BigInt predicted_regular(const Order& order) {
  std::map<int, int> mult;
  for (int l : order) ++mult[l];
  std::vector<int> r, q;
  for (auto [l, k] : mult) {
    if (k % 2 != 0) return 0;
    r.push_back(l);
    q.push_back(k / 2);
  }
  return regular_multiplicity(r, q);
}

void run_diagrams(const ExperimentConfig& c, Writer& w, std::ostream& log, RunOutcome& out) {
  const auto& s = c.diagrams;
  if (s.nu < 1 || s.nu > 4) throw ValidationError("diagrams.nu must be in 1..4");
  if (s.m < 1 || s.n0 < s.m) throw ValidationError("diagrams needs 1 <= m <= n0");
  std::vector<Order> orders;
  Order cur;
  sorted_orders(s.m, s.n0, 2 * s.nu, cur, orders);

  json doc;
  doc["nu"] = s.nu;
  doc["m"] = s.m;
  doc["n0"] = s.n0;
  doc["orders"] = json::array();
  std::string table = "order,complete,regular,regular_predicted,residual,nonregular_min_margin,inequality_ok\n";
  for (const Order& L : orders) {
    const InequalityCheck ic = nonregular_inequality_check(L);
    const std::uint64_t regular = ic.complete - ic.nonregular;
    const BigInt predicted = predicted_regular(L);
    const BigInt residual = BigInt(regular) - predicted;
    const std::string margin = ic.min_margin ? ic.min_margin->str() : "none";
    table += "\"" + to_string(L) + "\"," + std::to_string(ic.complete) + "," + std::to_string(regular) + "," +
             predicted.str() + "," + residual.str() + "," + margin + "," + (ic.ok ? "true" : "false") + "\n";
    doc["orders"].push_back({{"order", L},
                             {"complete", ic.complete},
                             {"regular", regular},
                             {"regular_predicted", predicted.str()},
                             {"residual", residual.str()},
                             {"nonregular_min_margin", margin},
                             {"inequality_ok", ic.ok}});
    if (residual != 0) out.failures.push_back("regular count mismatch for " + to_string(L));
    if (!ic.ok) out.failures.push_back("non-regular inequality fails for " + to_string(L));
  }
  // Sum identity with weights w_r = 1 / (r - m + 1).
  std::vector<Rational> weights;
  for (int r = s.m; r <= s.n0; ++r) weights.push_back(Rational(1, r - s.m + 1));
  const RegularSum rs = regular_sum(weights, s.m, s.nu);
  doc["regular_sum"] = {{"weights", [&] {
                           std::vector<std::string> v;
                           for (const auto& x : weights) v.push_back(x.str());
                           return v;
                         }()},
                        {"enumeration", rs.enumeration.str()},
                        {"closed_form", rs.closed_form.str()},
                        {"residual", rs.residual.str()},
                        {"diagrams", rs.diagrams.str()}};
  if (rs.residual != 0) out.failures.push_back("regular sum identity residual " + rs.residual.str());
  w.put("diagrams.json", doc.dump(2) + "\n");
  w.put("diagrams.csv", table);
  log << table << "regular sum: enumeration " << rs.enumeration << ", closed form " << rs.closed_form
      << ", residual " << rs.residual << "\n";
}

// ---- green

bool decreasing(const std::vector<MultiplierConvergence>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].sup_error < rows[i - 1].sup_error)) return false;
  }
  return true;
}

void run_green(const ExperimentConfig& c, Writer& w, std::ostream& log, RunOutcome& out) {
  const auto& g = c.green;
  const ModelParams params = make_params(c);
  if (!(g.t > 0.0) || !(g.lambda_max > 0.0) || g.panel_points < 1) {
    throw ValidationError("green.t and green.lambda_max must be > 0, green.panel_points >= 1");
  }
  const auto large = large_scale_convergence(params, g.t, g.large_scales, g.lambda_max, g.panel_points);
  const auto small = small_scale_convergence(params, g.t, g.small_scales, g.lambda_max, g.panel_points);

  json doc;
  doc["t"] = g.t;
  doc["large"] = json::array();
  doc["small"] = json::array();
  std::string csv = "kind,scale,sup_error,argmax_lambda,scaled_error,mass_gap\n";
  Series sl{"large", {}, {}}, ss{"small", {}, {}};
  for (const auto& r : large) {
    doc["large"].push_back({{"T", r.scale}, {"sup_error", r.sup_error}, {"argmax_lambda", r.argmax_lambda},
                            {"T_times_error", r.scale * r.sup_error}});
    csv += "large," + fmt(r.scale) + "," + fmt(r.sup_error) + "," + fmt(r.argmax_lambda) + "," +
           fmt(r.scale * r.sup_error) + ",\n";
    sl.x.push_back(r.scale);
    sl.y.push_back(r.sup_error);
  }
  for (const auto& r : small) {
    json row{{"eps", r.scale}, {"sup_error", r.sup_error}, {"argmax_lambda", r.argmax_lambda}};
    std::string gap;
    if (g.compare_mass > 0.0) {
      const double mg = small_scale_mass_gap(params.dim(), params.alpha(), params.mass(), g.compare_mass, r.scale, g.t,
                                             g.lambda_max, g.panel_points);
      row["mass_gap"] = mg;
      gap = fmt(mg);
    }
    doc["small"].push_back(row);
    csv += "small," + fmt(r.scale) + "," + fmt(r.sup_error) + "," + fmt(r.argmax_lambda) + ",," + gap + "\n";
    ss.x.push_back(1.0 / r.scale);
    ss.y.push_back(r.sup_error);
  }
  w.put("green.json", doc.dump(2) + "\n");
  w.put("green.csv", csv);
  w.plot("green_convergence", {sl, ss}, {"multiplier convergence", "T or 1/eps", "sup error", true, true}, c.svg);
  log << csv;
  if (!decreasing(large)) out.failures.push_back("large-scale multiplier error is not decreasing");
  if (!decreasing(small)) out.failures.push_back("small-scale multiplier error is not decreasing");
}

}  // namespace

RunOutcome run_verb(Verb verb, const ExperimentConfig& config, int threads, std::ostream& log) {
  RunOutcome out;
  fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    out.exit_code = kExitValidation;
    out.failures.push_back("cannot create output directory " + dir.string() + ": " + ec.message());
    return out;
  }
  fs::remove(dir / "FAILED", ec);
  Writer w(dir);
  try {
    w.put("config.toml", to_toml(config));
    switch (verb) {
      case Verb::validate: run_validate(config, threads, w, log, out); break;
      case Verb::simulate: run_simulate(config, w, log, out); break;
      case Verb::ladder: run_ladder_verb(config, threads, w, log, out); break;
      case Verb::lemma1: run_lemma1(config, w, log, out); break;
      case Verb::diagrams: run_diagrams(config, w, log, out); break;
      case Verb::green: run_green(config, w, log, out); break;
    }
    if (!out.failures.empty()) out.exit_code = kExitCheckFailed;
  } catch (const ValidationError& e) {
    out.exit_code = kExitValidation;
    out.failures = {e.what()};
  } catch (const std::exception& e) {
    out.exit_code = kExitNumerical;
    out.failures = {e.what()};
  }

  json manifest;
  manifest["verb"] = to_string(verb);
  manifest["config_hash"] = config_hash(config);
  manifest["master_seed"] = config.master_seed;
  manifest["status"] = out.exit_code == kExitOk ? "ok" : out.exit_code == kExitCheckFailed ? "checks_failed" : "failed";
  manifest["failures"] = out.failures;
  manifest["artifacts"] = json::array();
  for (const auto& a : w.artifacts) {
    char h[17];
    std::snprintf(h, sizeof h, "%016llx", static_cast<unsigned long long>(a.hash));
    manifest["artifacts"].push_back({{"file", a.name}, {"fnv1a64", h}});
  }
  manifest["config"] = json::parse(to_json(config));
  {
    std::ofstream m(dir / "manifest.json", std::ios::binary);
    m << manifest.dump(2) << "\n";
  }
  if (out.exit_code == kExitValidation || out.exit_code == kExitNumerical) {
    std::ofstream f(dir / "FAILED", std::ios::binary);
    f << out.failures.front() << "\n";
  }
  out.artifacts = std::move(w.artifacts);
  return out;
}

}  // namespace reldiff
