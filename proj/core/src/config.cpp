#include "reldiff/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <tomlplusplus/toml.hpp>

#include "reldiff/error.hpp"

namespace reldiff {

namespace {

// Typed access to one TOML table that remembers which keys were consumed.
class Reader {
 public:
  Reader(const toml::table* tbl, std::string name) : tbl_(tbl), name_(std::move(name)) {}

  void get(const char* key, double& out) {
    if (const toml::node* n = find(key)) {
      auto v = n->value<double>();
      if (!v || !(n->is_floating_point() || n->is_integer())) fail(key, "expected a number");
      out = *v;
    }
  }
  void get(const char* key, int& out) {
    if (const toml::node* n = find(key)) {
      if (!n->is_integer()) fail(key, "expected an integer");
      out = static_cast<int>(n->as_integer()->get());
    }
  }
  void get(const char* key, std::uint64_t& out) {
    if (const toml::node* n = find(key)) {
      if (!n->is_integer() || n->as_integer()->get() < 0) fail(key, "expected a nonnegative integer");
      out = static_cast<std::uint64_t>(n->as_integer()->get());
    }
  }
  void get(const char* key, bool& out) {
    if (const toml::node* n = find(key)) {
      if (!n->is_boolean()) fail(key, "expected true or false");
      out = n->as_boolean()->get();
    }
  }
  void get(const char* key, std::string& out) {
    if (const toml::node* n = find(key)) {
      if (!n->is_string()) fail(key, "expected a string");
      out = n->as_string()->get();
    }
  }
  void get(const char* key, std::vector<double>& out) {
    if (const toml::node* n = find(key)) {
      if (!n->is_array()) fail(key, "expected an array of numbers");
      out.clear();
      for (const auto& e : *n->as_array()) {
        auto v = e.value<double>();
        if (!v || !(e.is_floating_point() || e.is_integer())) fail(key, "expected an array of numbers");
        out.push_back(*v);
      }
    }
  }
  void get(const char* key, std::vector<int>& out) {
    if (const toml::node* n = find(key)) {
      if (!n->is_array()) fail(key, "expected an array of integers");
      out.clear();
      for (const auto& e : *n->as_array()) {
        if (!e.is_integer()) fail(key, "expected an array of integers");
        out.push_back(static_cast<int>(e.as_integer()->get()));
      }
    }
  }

  void finish() const {
    if (!tbl_) return;
    for (const auto& [k, v] : *tbl_) {
      if (!seen_.count(std::string(k.str()))) {
        throw ValidationError(name_ + "." + std::string(k.str()) + ": unknown key");
      }
    }
  }

  [[noreturn]] void fail(const char* key, const std::string& what) const {
    throw ValidationError(name_ + "." + key + ": " + what);
  }

 private:
  const toml::node* find(const char* key) {
    seen_.insert(key);
    return tbl_ ? tbl_->get(key) : nullptr;
  }

  const toml::table* tbl_;
  std::string name_;
  std::set<std::string> seen_;
};

const toml::table* section(const toml::table& root, const char* name) {
  const toml::node* n = root.get(name);
  if (!n) return nullptr;
  if (!n->is_table()) throw ValidationError(std::string(name) + ": expected a [" + name + "] table");
  return n->as_table();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    throw ValidationError(os.str());
  }
  static const std::set<std::string> known{"model",  "spectrum", "subordinator", "ladder", "probes", "simulate",
                                           "lemma1", "green",    "diagrams",     "seed",   "output"};
  for (const auto& [k, v] : root) {
    if (!known.count(std::string(k.str()))) throw ValidationError(std::string(k.str()) + ": unknown section");
  }

  ExperimentConfig c;
  {
    Reader r(section(root, "model"), "model");
    r.get("dim", c.model.dim);
    r.get("alpha", c.model.alpha);
    r.get("mass", c.model.mass);
    r.finish();
  }
  {
    Reader r(section(root, "spectrum"), "spectrum");
    r.get("kappa", c.spectrum.kappa);
    std::string family = to_string(c.spectrum.family);
    r.get("family", family);
    try {
      c.spectrum.family = bfamily_from_string(family);
    } catch (const ValidationError& e) {
      r.fail("family", e.what());
    }
    r.get("decay", c.spectrum.decay);
    r.finish();
  }
  {
    auto& s = c.subordinator;
    Reader r(section(root, "subordinator"), "subordinator");
    r.get("family", s.family);
    r.get("coefficients", s.coefficients);
    r.get("power", s.power);
    r.get("rate", s.rate);
    r.get("clip", s.clip);
    r.get("table_x", s.table_x);
    r.get("table_y", s.table_y);
    r.get("lmax", s.lmax);
    r.get("quad_order", s.quad_order);
    r.get("rank_tolerance", s.rank_tolerance);
    r.finish();
  }
  {
    auto& l = c.ladder;
    Reader r(section(root, "ladder"), "ladder");
    l.sigma_grid = default_frequency_grid(c.model.dim);
    std::string regime = to_string(l.regime);
    r.get("regime", regime);
    try {
      l.regime = regime_from_string(regime);
    } catch (const ValidationError& e) {
      r.fail("regime", e.what());
    }
    r.get("scales", l.scales);
    r.get("chi", l.chi);
    r.get("replicates", l.replicates);
    r.get("n0", l.n0);
    r.get("spacing", l.spacing);
    r.get("box_factor", l.box_factor);
    r.get("min_box", l.min_box);
    r.get("small_box", l.small_box);
    r.get("sigma_points", l.sigma_grid.points);
    r.get("sigma_half_width", l.sigma_grid.half_width);
    r.get("oracle_nodes", l.oracle_nodes);
    r.get("oracle_threshold_fraction", l.oracle_threshold_fraction);
    r.finish();
    // Small-scale defaults: eps ladder and a spacing fine enough for eps = 1/256.
    if (!is_large(l.regime)) {
      if (l.scales == LadderConfig{}.scales) l.scales = {0.25, 1.0 / 16, 1.0 / 64, 1.0 / 256};
      if (l.spacing == LadderConfig{}.spacing) l.spacing = 1.0 / 32;
    }
  }
  if (const toml::node* n = root.get("probes")) {
    if (!n->is_array_of_tables()) throw ValidationError("probes: expected [[probes]] entries");
    c.probes.clear();
    int idx = 0;
    for (const auto& e : *n->as_array()) {
      Reader r(e.as_table(), "probes[" + std::to_string(idx++) + "]");
      Probe p;
      std::vector<double> x{0.0};
      r.get("weight", p.weight);
      r.get("t", p.t);
      r.get("x", x);
      if (x.empty() || x.size() > 2) r.fail("x", "expected 1 or 2 coordinates");
      p.x = {x[0], x.size() > 1 ? x[1] : 0.0};
      r.finish();
      c.probes.push_back(p);
    }
  }
  {
    auto& s = c.simulate;
    Reader r(section(root, "simulate"), "simulate");
    s.grid.dim = c.model.dim;
    r.get("points", s.grid.points);
    r.get("box_length", s.grid.box_length);
    r.get("times", s.times);
    r.get("replicates", s.replicates);
    r.get("n0", s.n0);
    r.get("format", s.format);
    r.finish();
  }
  {
    auto& s = c.lemma1;
    Reader r(section(root, "lemma1"), "lemma1");
    s.grid = default_frequency_grid(c.model.dim);
    r.get("kappas", s.kappas);
    r.get("ks", s.ks);
    r.get("sup_kmax", s.sup_kmax);
    r.get("points", s.grid.points);
    r.get("half_width", s.grid.half_width);
    r.finish();
  }
  {
    auto& g = c.green;
    Reader r(section(root, "green"), "green");
    r.get("t", g.t);
    r.get("large_scales", g.large_scales);
    r.get("small_scales", g.small_scales);
    r.get("lambda_max", g.lambda_max);
    r.get("panel_points", g.panel_points);
    r.get("compare_mass", g.compare_mass);
    r.finish();
  }
  {
    Reader r(section(root, "diagrams"), "diagrams");
    r.get("nu", c.diagrams.nu);
    r.get("m", c.diagrams.m);
    r.get("n0", c.diagrams.n0);
    r.finish();
  }
  {
    Reader r(section(root, "seed"), "seed");
    r.get("master", c.master_seed);
    r.finish();
  }
  {
    Reader r(section(root, "output"), "output");
    r.get("dir", c.output_dir);
    r.get("svg", c.svg);
    r.finish();
  }
  c.ladder.master_seed = c.master_seed;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  // TOML floats need a fraction or exponent.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

template <class T>
std::string list(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      s += num(v[i]);
    } else {
      s += std::to_string(v[i]);
    }
  }
  return s + "]";
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

std::string to_toml(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[model]\ndim = " << c.model.dim << "\nalpha = " << num(c.model.alpha) << "\nmass = " << num(c.model.mass)
     << "\n\n";
  os << "[spectrum]\nkappa = " << num(c.spectrum.kappa) << "\nfamily = " << quoted(to_string(c.spectrum.family))
     << "\ndecay = " << num(c.spectrum.decay) << "\n\n";
  const auto& s = c.subordinator;
  os << "[subordinator]\nfamily = " << quoted(s.family) << "\ncoefficients = " << list(s.coefficients)
     << "\npower = " << s.power << "\nrate = " << num(s.rate) << "\nclip = " << num(s.clip)
     << "\ntable_x = " << list(s.table_x) << "\ntable_y = " << list(s.table_y) << "\nlmax = " << s.lmax
     << "\nquad_order = " << s.quad_order << "\nrank_tolerance = " << num(s.rank_tolerance) << "\n\n";
  const auto& l = c.ladder;
  os << "[ladder]\nregime = " << quoted(to_string(l.regime)) << "\nscales = " << list(l.scales)
     << "\nchi = " << num(l.chi) << "\nreplicates = " << l.replicates << "\nn0 = " << l.n0
     << "\nspacing = " << num(l.spacing) << "\nbox_factor = " << num(l.box_factor) << "\nmin_box = " << num(l.min_box)
     << "\nsmall_box = " << num(l.small_box) << "\nsigma_points = " << l.sigma_grid.points
     << "\nsigma_half_width = " << num(l.sigma_grid.half_width) << "\noracle_nodes = " << l.oracle_nodes
     << "\noracle_threshold_fraction = " << num(l.oracle_threshold_fraction) << "\n\n";
  for (const auto& p : c.probes) {
    os << "[[probes]]\nweight = " << num(p.weight) << "\nt = " << num(p.t) << "\nx = "
       << (c.model.dim == 1 ? list(std::vector<double>{p.x[0]}) : list(std::vector<double>{p.x[0], p.x[1]}))
       << "\n\n";
  }
  const auto& sim = c.simulate;
  os << "[simulate]\npoints = " << sim.grid.points << "\nbox_length = " << num(sim.grid.box_length)
     << "\ntimes = " << list(sim.times) << "\nreplicates = " << sim.replicates << "\nn0 = " << sim.n0
     << "\nformat = " << quoted(sim.format) << "\n\n";
  const auto& le = c.lemma1;
  os << "[lemma1]\nkappas = " << list(le.kappas) << "\nks = " << list(le.ks) << "\nsup_kmax = " << le.sup_kmax
     << "\npoints = " << le.grid.points << "\nhalf_width = " << num(le.grid.half_width) << "\n\n";
  const auto& g = c.green;
  os << "[green]\nt = " << num(g.t) << "\nlarge_scales = " << list(g.large_scales)
     << "\nsmall_scales = " << list(g.small_scales) << "\nlambda_max = " << num(g.lambda_max)
     << "\npanel_points = " << g.panel_points << "\ncompare_mass = " << num(g.compare_mass) << "\n\n";
  os << "[diagrams]\nnu = " << c.diagrams.nu << "\nm = " << c.diagrams.m << "\nn0 = " << c.diagrams.n0 << "\n\n";
  os << "[seed]\nmaster = " << c.master_seed << "\n\n";
  os << "[output]\ndir = " << quoted(c.output_dir) << "\nsvg = " << (c.svg ? "true" : "false") << "\n";
  return os.str();
}

std::string to_json(const ExperimentConfig& c) {
  // Round-trip through the TOML form so both renderings always agree.
  const toml::table t = toml::parse(to_toml(c));
  std::ostringstream os;
  os << toml::json_formatter{t};
  return nlohmann::ordered_json::parse(os.str()).dump(2) + "\n";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ModelParams make_params(const ExperimentConfig& c) { return ModelParams(c.model.dim, c.model.alpha, c.model.mass); }

SpectralDensity make_density(const ExperimentConfig& c) {
  return SpectralDensity::normalized(c.model.dim, c.spectrum.kappa, c.spectrum.family, c.spectrum.decay);
}

Subordinator make_subordinator(const ExperimentConfig& c) {
  const auto& s = c.subordinator;
  SubordinatorFamily h = [&] {
    if (s.family == "hermite_series") return SubordinatorFamily::hermite_series(s.coefficients);
    if (s.family == "power") return SubordinatorFamily::power(s.power);
    if (s.family == "absolute") return SubordinatorFamily::absolute();
    if (s.family == "sign") return SubordinatorFamily::sign();
    if (s.family == "exp_clipped") return SubordinatorFamily::exp_clipped(s.rate, s.clip);
    if (s.family == "table") return SubordinatorFamily::table(s.table_x, s.table_y);
    throw ValidationError("subordinator.family: unknown family '" + s.family + "'");
  }();
  return Subordinator::build(std::move(h), s.lmax, s.quad_order, s.rank_tolerance);
}

ValidationReport validate_config(const ExperimentConfig& c, int threads) {
  const ModelParams params = make_params(c);
  const SpectralDensity sd = make_density(c);
  const Subordinator sub = make_subordinator(c);
  ValidationReport rep;
  rep.rank = sub.rank();
  rep.condition = classify(sd.kappa(), params.dim(), rep.rank);
  validate_ladder(c.ladder, c.probes, sd, sub, params);
  rep.theta = scaling_exponent(c.ladder.regime, params.dim(), rep.rank, sd.kappa(), c.ladder.chi);
  rep.limit_kind = to_string(limit_kind(c.ladder.regime));
  if (!is_large(c.ladder.regime)) rep.minimal_eps = minimal_admissible_eps(c.ladder.spacing, c.ladder.chi);

  double worst = 0.0;
  const double M = static_cast<double>(c.probes.size());
  for (double s : c.ladder.scales) {
    const GridSpec g = ladder_grid(c.ladder, c.probes, params, s);
    const double total = static_cast<double>(g.total());
    const double half = g.dim == 1 ? static_cast<double>(g.points / 2 + 1)
                                   : static_cast<double>(g.points) * static_cast<double>(g.points / 2 + 1);
    // Shared: lattice masses, torus covariance work arrays, per-probe multipliers.
    const double shared = 8.0 * total * 4.0 + 16.0 * half * (M + 2.0);
    // Per worker: field, initial data, M solutions, two spectra.
    const double worker = 8.0 * total * (2.0 + M) + 16.0 * half * 3.0;
    worst = std::max(worst, shared + worker * std::max(1, threads));
  }
  const double rows = 8.0 * c.ladder.replicates * (4.0 + M * M);
  rep.memory_bytes = worst + rows;
  if (rep.memory_bytes > 4e9) rep.notes.push_back("memory estimate exceeds 4 GB");
  if (c.ladder.n0 < sub.lmax() && sub.tail_energy(c.ladder.n0) > 0.0) {
    rep.notes.push_back("chaos truncated at N0 = " + std::to_string(c.ladder.n0) + " with tail energy " +
                        std::to_string(sub.tail_energy(c.ladder.n0)));
  }
  return rep;
}

std::string to_json(const ValidationReport& r) {
  nlohmann::ordered_json j;
  j["condition"] = to_string(r.condition.tag);
  j["kappa"] = r.condition.kappa;
  j["n"] = r.condition.n;
  j["rank"] = r.rank;
  j["theta"] = r.theta;
  j["limit_kind"] = r.limit_kind;
  j["memory_bytes"] = r.memory_bytes;
  j["minimal_eps"] = r.minimal_eps ? nlohmann::ordered_json(*r.minimal_eps) : nlohmann::ordered_json(nullptr);
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

}  // namespace reldiff
