#include "bogolab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "bogolab/kernels.hpp"
#include "bogolab/manybody.hpp"
#include "bogolab/oneparticle.hpp"
#include "bogolab/symbols.hpp"

namespace bogolab::cli {

namespace {

// Strict object reader: every key must be consumed, errors carry the key path.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  std::string where(const std::string& key) const {
    return path_.empty() ? key : key.empty() ? path_ : path_ + "." + key;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(where(key) + ": " + what);
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!j_.contains(key)) return;
    used_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, "wrong type");
    }
  }

  template <class T>
  void require(const std::string& key, T& out) {
    if (!j_.contains(key)) fail(key, "missing");
    get(key, out);
  }

  Reader child(const std::string& key) {
    used_.insert(key);
    return Reader(j_.at(key), where(key));
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) fail(it.key(), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void check(bool ok, const Reader& r, const std::string& key, const std::string& what) {
  if (!ok) r.fail(key, what);
}

void read_schema(Reader& r) {
  int v = 0;
  r.require("schema_version", v);
  check(v == kConfigSchemaVersion, r, "schema_version",
        "unsupported version " + std::to_string(v));
}

void read_potential(Reader& r, PotentialConfig& p) {
  r.get("cell_size", p.cell_size);
  r.get("amplitude", p.amplitude);
  r.get("vacancy", p.vacancy);
  check(p.cell_size > 0.0, r, "cell_size", "must be positive");
  check(std::isfinite(p.amplitude), r, "amplitude", "must be finite");
  check(p.amplitude >= 0.0, r, "amplitude", "must be nonnegative");
  check(p.vacancy >= 0.0 && p.vacancy < 1.0, r, "vacancy", "must lie in [0, 1)");
  r.finish();
}

json potential_json(const PotentialConfig& p) {
  return {{"cell_size", p.cell_size}, {"amplitude", p.amplitude}, {"vacancy", p.vacancy}};
}

void check_geometry(const Reader& r, int dimension, double side, int cutoff) {
  check(dimension >= 1 && dimension <= 3, r, "dimension", "must be 1, 2 or 3");
  check(side > 0.0 && std::isfinite(side), r, "side_length", "must be positive");
  check(cutoff >= 0, r, "cutoff", "must be nonnegative");
  const double modes = std::pow(2.0 * cutoff + 1.0, dimension);
  check(modes <= static_cast<double>(kModeCap), r, "cutoff",
        "more than " + std::to_string(kModeCap) + " plane-wave modes");
}

int auto_cutoff(double side, double e_cover) {
  return static_cast<int>(std::ceil(side * std::sqrt(2.0 * e_cover) / (2.0 * kPi)));
}

double cover_energy(double e_max, const PotentialConfig& p) {
  return 2.0 * std::max(e_max, 0.0) + 10.0 * std::abs(p.amplitude) + 5.0;
}

void read_cell(Reader& r, pressure::CellSpec& c, bool energy_band = true) {
  r.get("dimension", c.dimension);
  r.get("side_length", c.side_length);
  r.get("cutoff", c.cutoff);
  r.get("delta", c.delta);
  if (r.has("potential")) {
    auto p = r.child("potential");
    PotentialConfig pc{c.cell_size, c.amplitude, c.vacancy};
    read_potential(p, pc);
    c.cell_size = pc.cell_size;
    c.amplitude = pc.amplitude;
    c.vacancy = pc.vacancy;
  }
  r.get("seed", c.seed);
  if (r.has("interaction")) {
    auto i = r.child("interaction");
    i.get("u0", c.u0);
    i.get("sigma", c.sigma);
    check(std::isfinite(c.u0), i, "u0", "must be finite");
    check(c.sigma > 0.0, i, "sigma", "must be positive");
    i.finish();
  }
  r.get("beta", c.thermo.beta);
  r.get("mu", c.thermo.mu);
  r.get("n_max", c.n_max);
  r.finish();

  check_geometry(r, c.dimension, c.side_length, c.cutoff);
  check(c.cutoff >= 1, r, "cutoff", "must be at least 1");
  check(c.delta > 0.0, r, "delta", "must be positive");
  check(c.thermo.beta >= kBetaMin && c.thermo.beta <= kBetaMax, r, "beta",
        "must lie in [0.25, 2]");
  check(std::isfinite(c.thermo.mu), r, "mu", "must be finite");
  check(c.n_max >= 1 && c.n_max <= kNmaxCap, r, "n_max",
        "must lie in [1, " + std::to_string(kNmaxCap) + "]");
  if (!energy_band) return;
  const oneparticle::KineticBasis kin(c.dimension, c.side_length, c.cutoff);
  const auto band = symbols::build_band(kin, c.delta);
  check(band.size() >= 1 && band.size() <= kBandCap, r, "delta",
        "band holds " + std::to_string(band.size()) + " modes, quadrature supports 1 or 2");
}

json cell_json(const pressure::CellSpec& c) {
  return {{"dimension", c.dimension},
          {"side_length", c.side_length},
          {"cutoff", c.cutoff},
          {"delta", c.delta},
          {"potential", potential_json({c.cell_size, c.amplitude, c.vacancy})},
          {"seed", c.seed},
          {"interaction", {{"u0", c.u0}, {"sigma", c.sigma}}},
          {"beta", c.thermo.beta},
          {"mu", c.thermo.mu},
          {"n_max", c.n_max}};
}

template <class T>
void check_nonempty(const Reader& r, const std::string& key, const std::vector<T>& v) {
  if (v.empty()) r.fail(key, "must not be empty");
}

std::string scaling_name(perfectgas::SourceScaling s) {
  return s == perfectgas::SourceScaling::fixed_label ? "fixed_label" : "fixed_energy";
}

std::string order_name(perfectgas::LimitOrder o) {
  return o == perfectgas::LimitOrder::volume_first ? "volume_first" : "source_first";
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const RunOptions& o, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(o.out, ec);
  std::ofstream f(o.out / name, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + (o.out / name).string());
  return f;
}

void write_json(const RunOptions& o, const std::string& name, const json& j) {
  auto f = open_out(o, name);
  f << j.dump(2) << '\n';
}

std::vector<std::uint64_t> seeds_for(const std::vector<std::uint64_t>& seeds, const RunOptions& o) {
  if (o.seed) return {*o.seed};
  return seeds;
}

json terms_json(const manybody::Polynomial& p, const symbols::ModeBand& band) {
  json terms = json::array();
  for (const auto& t : p.terms()) {
    json c = json::array(), a = json::array();
    for (int i = 0; i < t.n_create; ++i) c.push_back(t.creators[i]);
    for (int i = 0; i < t.n_annihilate; ++i) a.push_back(t.annihilators[i]);
    terms.push_back({{"family", symbols::term_family(t, band)},
                     {"creators", c},
                     {"annihilators", a},
                     {"re", t.coeff.real()},
                     {"im", t.coeff.imag()}});
  }
  return {{"modes", p.mode_count()},
          {"band", band.band},
          {"scalar", {p.scalar().real(), p.scalar().imag()}},
          {"terms", terms}};
}

}  // namespace

// ---------------------------------------------------------------- parsing

IdsConfig parse_ids(const json& j) {
  Reader r(j, "ids");
  read_schema(r);
  IdsConfig c;
  r.get("dimension", c.dimension);
  r.require("side_lengths", c.side_lengths);
  r.get("cutoff", c.cutoff);
  if (r.has("potential")) {
    auto p = r.child("potential");
    read_potential(p, c.potential);
  }
  r.require("seeds", c.seeds);
  if (r.has("energies")) {
    auto e = r.child("energies");
    e.get("min", c.e_min);
    e.get("max", c.e_max);
    e.get("count", c.e_count);
    check(c.e_count >= 1, e, "count", "must be at least 1");
    check(c.e_max >= c.e_min, e, "max", "must not be below min");
    e.finish();
  }
  r.finish();
  check_nonempty(r, "side_lengths", c.side_lengths);
  check_nonempty(r, "seeds", c.seeds);
  for (double l : c.side_lengths) {
    const int cut = c.cutoff > 0 ? c.cutoff : auto_cutoff(l, cover_energy(c.e_max, c.potential));
    check_geometry(r, c.dimension, l, cut);
  }
  return c;
}

SpectrumConfig parse_spectrum(const json& j) {
  Reader r(j, "spectrum");
  read_schema(r);
  SpectrumConfig c;
  r.get("dimension", c.dimension);
  r.get("side_length", c.side_length);
  r.get("cutoff", c.cutoff);
  if (r.has("potential")) {
    auto p = r.child("potential");
    read_potential(p, c.potential);
  }
  r.require("seeds", c.seeds);
  r.get("levels", c.levels);
  r.finish();
  check_nonempty(r, "seeds", c.seeds);
  check(c.levels >= 1, r, "levels", "must be at least 1");
  const int cut = c.cutoff > 0 ? c.cutoff : auto_cutoff(c.side_length, cover_energy(1.0, c.potential));
  check_geometry(r, c.dimension, c.side_length, cut);
  return c;
}

SandwichConfig parse_sandwich(const json& j) {
  Reader r(j, "sandwich");
  read_schema(r);
  SandwichConfig c;
  if (r.has("defaults") && !r.has("cells"))
    r.fail("cells", "missing");
  json defaults = json::object();
  if (r.has("defaults")) {
    defaults = r.raw("defaults");
    if (!defaults.is_object()) r.fail("defaults", "expected an object");
  }
  if (r.has("cells")) {
    const json& cells = r.raw("cells");
    if (!cells.is_array()) r.fail("cells", "expected an array");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!cells[i].is_object()) r.fail("cells[" + std::to_string(i) + "]", "expected an object");
      json merged = defaults;
      merged.merge_patch(cells[i]);
      Reader cr(merged, r.where("cells[" + std::to_string(i) + "]"));
      pressure::CellSpec spec;
      read_cell(cr, spec);
      c.cells.push_back(spec);
    }
  }
  if (r.has("optimizer")) {
    auto o = r.child("optimizer");
    auto& opt = c.options.optimizer;
    o.get("restarts", opt.restarts);
    o.get("tolerance", opt.tolerance);
    o.get("max_iterations", opt.max_iterations);
    o.get("seed_radius", opt.seed_radius);
    check(opt.restarts >= 1, o, "restarts", "must be at least 1");
    check(opt.tolerance > 0.0, o, "tolerance", "must be positive");
    check(opt.max_iterations >= 10, o, "max_iterations", "must be at least 10");
    check(opt.seed_radius > 0.0, o, "seed_radius", "must be positive");
    o.finish();
  }
  if (r.has("quadrature")) {
    auto q = r.child("quadrature");
    auto& qo = c.options.quadrature;
    q.get("radial", qo.radial);
    q.get("angular", qo.angular);
    q.get("coarse_radial", qo.coarse_radial);
    q.get("coarse_angular", qo.coarse_angular);
    auto in_range = [&](const char* key, int v) { check(v >= 4 && v <= 256, q, key, "must lie in [4, 256]"); };
    in_range("radial", qo.radial);
    in_range("angular", qo.angular);
    in_range("coarse_radial", qo.coarse_radial);
    in_range("coarse_angular", qo.coarse_angular);
    q.finish();
  }
  r.get("negative_control", c.options.flip_kappa);
  r.finish();
  check_nonempty(r, "cells", c.cells);
  return c;
}

QuasiAverageRunConfig parse_quasiaverage(const json& j) {
  Reader r(j, "quasiaverage");
  read_schema(r);
  QuasiAverageRunConfig c;
  r.get("beta", c.beta);
  check(c.beta >= kBetaMin && c.beta <= kBetaMax, r, "beta", "must lie in [0.25, 2]");
  if (r.has("window")) {
    auto w = r.child("window");
    std::string kind = "power_law";
    w.get("kind", kind);
    if (kind == "power_law") c.window.kind = perfectgas::WindowRule::Kind::power_law;
    else if (kind == "lowest_multiple") c.window.kind = perfectgas::WindowRule::Kind::lowest_multiple;
    else w.fail("kind", "expected power_law or lowest_multiple");
    w.get("exponent", c.window.exponent);
    w.get("multiple", c.window.multiple);
    check(c.window.exponent > 0.0 && c.window.exponent < 2.0 / 3.0, w, "exponent",
          "must lie in (0, 2/3)");
    check(c.window.multiple > 1.0, w, "multiple", "must exceed 1");
    w.finish();
  }
  r.get("threshold", c.threshold);
  check(c.threshold > 0.0 && c.threshold < 1.0, r, "threshold", "must lie in (0, 1)");
  const json& cells = r.raw("cells");
  if (!cells.is_array()) r.fail("cells", "expected an array");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    Reader cr(cells[i], r.where("cells[" + std::to_string(i) + "]"));
    QuasiAverageCell q;
    cr.require("alpha", q.alpha);
    cr.require("density_ratio", q.density_ratio);
    cr.require("volumes", q.volumes);
    cr.get("etas", q.etas);
    cr.get("source", q.source);
    std::string scaling = scaling_name(q.scaling), order = order_name(q.order);
    cr.get("source_scaling", scaling);
    cr.get("source_energy", q.source_energy);
    cr.get("limit_order", order);
    cr.get("expect", q.expect);
    cr.finish();

    const double sum = q.alpha[0] + q.alpha[1] + q.alpha[2];
    check(std::abs(sum - 1.0) < 1e-12, cr, "alpha", "exponents must sum to 1");
    check(q.alpha[0] >= q.alpha[1] && q.alpha[1] >= q.alpha[2] && q.alpha[2] > 0.0, cr, "alpha",
          "must satisfy alpha_x >= alpha_y >= alpha_z > 0");
    check(q.density_ratio > 0.0, cr, "density_ratio", "must be positive");
    check(q.volumes.size() >= 3, cr, "volumes", "needs at least three volumes");
    for (double v : q.volumes) check(v > 1.0, cr, "volumes", "must exceed 1");
    for (double e : q.etas) check(e >= 0.0, cr, "etas", "must be nonnegative");
    const auto positive = std::count_if(q.etas.begin(), q.etas.end(), [](double e) { return e > 0.0; });
    check(positive == 0 || positive >= 3, cr, "etas", "a source sweep needs at least three positive etas");
    if (scaling == "fixed_label") q.scaling = perfectgas::SourceScaling::fixed_label;
    else if (scaling == "fixed_energy") q.scaling = perfectgas::SourceScaling::fixed_energy;
    else cr.fail("source_scaling", "expected fixed_label or fixed_energy");
    if (order == "volume_first") q.order = perfectgas::LimitOrder::volume_first;
    else if (order == "source_first") q.order = perfectgas::LimitOrder::source_first;
    else cr.fail("limit_order", "expected volume_first or source_first");
    check(q.source != oneparticle::Label{0, 0, 0}, cr, "source", "must not be the ground mode");
    check(q.source_energy > 0.0, cr, "source_energy", "must be positive");
    static const std::set<std::string> kinds{"", "none", "I", "II", "III", "inconclusive"};
    check(kinds.count(q.expect) == 1, cr, "expect", "unknown classification");
    c.cells.push_back(q);
  }
  r.finish();
  check_nonempty(r, "cells", c.cells);
  return c;
}

SymbolCheckConfig parse_symbol_check(const json& j) {
  Reader r(j, "symbol-check");
  read_schema(r);
  SymbolCheckConfig c;
  json cell = json::object();
  if (r.has("cell")) cell = r.raw("cell");
  Reader cr(cell, r.where("cell"));
  read_cell(cr, c.cell, !r.has("band_labels"));
  r.get("band_labels", c.band_labels);
  r.get("points", c.points);
  r.get("radius", c.radius);
  r.get("band_cap", c.band_cap);
  r.get("point_seed", c.point_seed);
  r.get("tolerance", c.tolerance);
  r.get("kappa_sign", c.kappa_sign);
  r.finish();
  check(c.points >= 1, r, "points", "must be at least 1");
  check(c.radius > 0.0, r, "radius", "must be positive");
  check(c.band_cap >= 2 * c.radius * c.radius + 20, r, "band_cap",
        "too small for the coherent tail at this radius");
  check(c.tolerance > 0.0, r, "tolerance", "must be positive");
  check(c.kappa_sign == 1.0 || c.kappa_sign == -1.0, r, "kappa_sign", "must be 1 or -1");
  if (!c.band_labels.empty()) {
    check(c.band_labels.size() <= static_cast<std::size_t>(kBandCap), r, "band_labels",
          "at most two band modes");
    const oneparticle::KineticBasis kin(c.cell.dimension, c.cell.side_length, c.cell.cutoff);
    for (const auto& l : c.band_labels)
      check(kin.find(l) >= 0, r, "band_labels", "label outside the mode cutoff");
  }
  return c;
}

json to_json(const IdsConfig& c) {
  return {{"schema_version", kConfigSchemaVersion},
          {"dimension", c.dimension},
          {"side_lengths", c.side_lengths},
          {"cutoff", c.cutoff},
          {"potential", potential_json(c.potential)},
          {"seeds", c.seeds},
          {"energies", {{"min", c.e_min}, {"max", c.e_max}, {"count", c.e_count}}}};
}

json to_json(const SpectrumConfig& c) {
  return {{"schema_version", kConfigSchemaVersion},
          {"dimension", c.dimension},
          {"side_length", c.side_length},
          {"cutoff", c.cutoff},
          {"potential", potential_json(c.potential)},
          {"seeds", c.seeds},
          {"levels", c.levels}};
}

json to_json(const SandwichConfig& c) {
  json cells = json::array();
  for (const auto& s : c.cells) cells.push_back(cell_json(s));
  const auto& o = c.options.optimizer;
  const auto& q = c.options.quadrature;
  return {{"schema_version", kConfigSchemaVersion},
          {"cells", cells},
          {"optimizer",
           {{"restarts", o.restarts},
            {"tolerance", o.tolerance},
            {"max_iterations", o.max_iterations},
            {"seed_radius", o.seed_radius}}},
          {"quadrature",
           {{"radial", q.radial},
            {"angular", q.angular},
            {"coarse_radial", q.coarse_radial},
            {"coarse_angular", q.coarse_angular}}},
          {"negative_control", c.options.flip_kappa}};
}

json to_json(const QuasiAverageRunConfig& c) {
  json cells = json::array();
  for (const auto& q : c.cells)
    cells.push_back({{"alpha", q.alpha},
                     {"density_ratio", q.density_ratio},
                     {"volumes", q.volumes},
                     {"etas", q.etas},
                     {"source", q.source},
                     {"source_scaling", scaling_name(q.scaling)},
                     {"source_energy", q.source_energy},
                     {"limit_order", order_name(q.order)},
                     {"expect", q.expect}});
  const bool power = c.window.kind == perfectgas::WindowRule::Kind::power_law;
  return {{"schema_version", kConfigSchemaVersion},
          {"beta", c.beta},
          {"window",
           {{"kind", power ? "power_law" : "lowest_multiple"},
            {"exponent", c.window.exponent},
            {"multiple", c.window.multiple}}},
          {"threshold", c.threshold},
          {"cells", cells}};
}

json to_json(const SymbolCheckConfig& c) {
  json j = {{"schema_version", kConfigSchemaVersion},
            {"cell", cell_json(c.cell)},
            {"points", c.points},
            {"radius", c.radius},
            {"band_cap", c.band_cap},
            {"point_seed", c.point_seed},
            {"tolerance", c.tolerance},
            {"kappa_sign", c.kappa_sign}};
  if (!c.band_labels.empty()) j["band_labels"] = c.band_labels;
  return j;
}

// ---------------------------------------------------------------- runs

int run_ids(const IdsConfig& c, const RunOptions& o) {
  auto f = open_out(o, "ids.csv");
  f << "l,seed,E,nu,nu_weyl\n";
  const double cd = oneparticle::weyl_constant(c.dimension);
  for (double l : c.side_lengths) {
    const int cut = c.cutoff > 0 ? c.cutoff : auto_cutoff(l, cover_energy(c.e_max, c.potential));
    const oneparticle::KineticBasis kin(c.dimension, l, cut);
    for (auto seed : seeds_for(c.seeds, o)) {
      const auto pot = oneparticle::sample_potential(c.dimension, l, c.potential.cell_size,
                                                     c.potential.amplitude, c.potential.vacancy,
                                                     seed);
      const auto eigs = oneparticle::diagonalize(kin, pot);
      for (int i = 0; i < c.e_count; ++i) {
        const double e = c.e_count == 1 ? c.e_min
                                        : c.e_min + (c.e_max - c.e_min) * i / (c.e_count - 1);
        const double weyl = e > 0.0 ? cd * std::pow(e, 0.5 * c.dimension) : 0.0;
        f << num(l) << ',' << seed << ',' << num(e) << ','
          << num(oneparticle::ids(eigs, kin.volume(), e)) << ',' << num(weyl) << '\n';
      }
    }
  }
  return kOk;
}

int run_spectrum(const SpectrumConfig& c, const RunOptions& o) {
  const int cut = c.cutoff > 0 ? c.cutoff : auto_cutoff(c.side_length, cover_energy(1.0, c.potential));
  const oneparticle::KineticBasis kin(c.dimension, c.side_length, cut);
  auto f = open_out(o, "spectrum.csv");
  f << "l,seed,index,energy\n";
  for (auto seed : seeds_for(c.seeds, o)) {
    const auto pot = oneparticle::sample_potential(c.dimension, c.side_length, c.potential.cell_size,
                                                   c.potential.amplitude, c.potential.vacancy, seed);
    const auto eigs = oneparticle::diagonalize(kin, pot);
    const int n = std::min<int>(c.levels, static_cast<int>(eigs.eigenvalues.size()));
    for (int i = 0; i < n; ++i)
      f << num(c.side_length) << ',' << seed << ',' << i << ',' << num(eigs.eigenvalues[i]) << '\n';
  }
  return kOk;
}

int run_sandwich(const SandwichConfig& c, const RunOptions& o) {
  std::vector<pressure::CellSpec> cells = c.cells;
  if (o.seed)
    for (auto& s : cells) s.seed = *o.seed;

  std::ostringstream csv;
  pressure::write_csv_header(csv);
  json summary_cells = json::array();
  json failing = json::array();
  json dumps = json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto r = pressure::run_cell(cells[i], c.options);
    pressure::write_csv_row(csv, r, o.timing);
    const bool ok = r.sandwich_ok && r.max_bound_ok && r.residual_ok && r.bogoliubov_ok;
    summary_cells.push_back({{"index", i},
                             {"seed", r.spec.seed},
                             {"beta", r.spec.thermo.beta},
                             {"mu", r.spec.thermo.mu},
                             {"n_max", r.spec.n_max},
                             {"sandwich", r.sandwich_ok},
                             {"max_bound", r.max_bound_ok},
                             {"residual", r.residual_ok},
                             {"bogoliubov", r.bogoliubov_ok},
                             {"log_xi_exact", r.exact.log_xi},
                             {"log_xi_low", r.integrated.log_xi_low},
                             {"log_xi_up", r.integrated.log_xi_up},
                             {"quadrature_error_low", r.integrated.error_low},
                             {"quadrature_error_up", r.integrated.error_up},
                             {"k_rigorous", r.budget.k_rigorous},
                             {"truncation_delta", r.exact.truncation_delta}});
    if (!ok) failing.push_back(i);
    if (o.dump_terms) {
      const oneparticle::KineticBasis kin(cells[i].dimension, cells[i].side_length, cells[i].cutoff);
      const auto pot = oneparticle::sample_potential(cells[i].dimension, cells[i].side_length,
                                                     cells[i].cell_size, cells[i].amplitude,
                                                     cells[i].vacancy, cells[i].seed);
      const auto h = manybody::assemble_full(kin, oneparticle::diagonalize(kin, pot),
                                             {cells[i].u0, cells[i].sigma}, cells[i].thermo.mu);
      dumps.push_back(terms_json(h.terms, symbols::build_band(kin, cells[i].delta)));
    }
  }
  {
    auto f = open_out(o, "sandwich.csv");
    f << csv.str();
  }
  write_json(o, "sandwich_summary.json",
             {{"schema_version", kConfigSchemaVersion},
              {"negative_control", c.options.flip_kappa},
              {"cells", summary_cells},
              {"failing", failing},
              {"pass", failing.empty()}});
  if (o.dump_terms) write_json(o, "terms.json", dumps);
  if (!failing.empty()) {
    std::cerr << "sandwich: " << failing.size() << " failing cell(s): " << failing.dump() << '\n';
    return kAssertionFailure;
  }
  return kOk;
}

int run_quasiaverage(const QuasiAverageRunConfig& c, const RunOptions& o) {
  const double rho_c = perfectgas::critical_density(c.beta);
  std::ostringstream cls, qa;
  cls << "cell,alpha_x,alpha_y,alpha_z,beta,rho_bar,V,mu,ground_density,window_density,"
         "max_mode_density,classification\n";
  bool any_source = false;
  for (const auto& q : c.cells)
    for (double e : q.etas) any_source = any_source || e > 0.0;
  if (any_source)
    qa << "cell,eta,V,mu,source_energy,source_density,ground_density\n";

  json cells = json::array();
  bool failed = false;
  for (std::size_t i = 0; i < c.cells.size(); ++i) {
    const auto& q = c.cells[i];
    const double rho_bar = q.density_ratio * rho_c;
    const auto rep = perfectgas::classify_condensation(q.alpha, c.beta, rho_bar, q.volumes,
                                                       c.window, c.threshold);
    const std::string name = perfectgas::to_string(rep.classification);
    for (const auto& p : rep.points)
      cls << i << ',' << num(q.alpha[0]) << ',' << num(q.alpha[1]) << ',' << num(q.alpha[2]) << ','
          << num(c.beta) << ',' << num(rho_bar) << ',' << num(p.volume) << ',' << num(p.mu) << ','
          << num(p.ground_density) << ',' << num(p.window_density) << ','
          << num(p.max_mode_density) << ',' << name << '\n';
    json cj = {{"index", i},
               {"alpha", q.alpha},
               {"rho_bar", rho_bar},
               {"rho_c", rho_c},
               {"classification", name},
               {"inconclusive", rep.classification == perfectgas::Condensation::inconclusive},
               {"ground_extrapolated", rep.ground_extrapolated},
               {"window_extrapolated", rep.window_extrapolated},
               {"macroscopic_modes", rep.macroscopic_modes}};
    if (!q.expect.empty()) {
      const bool ok = q.expect == name;
      cj["expect"] = q.expect;
      cj["expect_ok"] = ok;
      failed = failed || !ok;
    }

    std::vector<double> etas;
    for (double e : q.etas)
      if (e > 0.0) etas.push_back(e);
    if (!etas.empty()) {
      perfectgas::QuasiAverageConfig qc;
      qc.alpha = q.alpha;
      qc.beta = c.beta;
      qc.rho_bar = rho_bar;
      qc.source = q.source;
      qc.scaling = q.scaling;
      qc.source_energy = q.source_energy;
      qc.etas = etas;
      qc.volumes = q.volumes;
      qc.order = q.order;
      const auto sweep = perfectgas::quasi_average_sweep(qc);
      for (const auto& p : sweep.points)
        qa << i << ',' << num(p.eta) << ',' << num(p.volume) << ',' << num(p.mu) << ','
           << num(p.source_energy) << ',' << num(p.source_density) << ','
           << num(p.ground_density) << '\n';
      cj["source_by_eta"] = sweep.source_by_eta;
      cj["ground_by_eta"] = sweep.ground_by_eta;
      cj["source_limit"] = sweep.source_limit;
      cj["ground_limit"] = sweep.ground_limit;
    }
    cells.push_back(cj);
  }
  {
    auto f = open_out(o, "condensation.csv");
    f << cls.str();
  }
  if (any_source) {
    auto f = open_out(o, "quasiaverage.csv");
    f << qa.str();
  }
  write_json(o, "quasiaverage.json",
             {{"schema_version", kConfigSchemaVersion}, {"rho_c", rho_c}, {"cells", cells}});
  return failed ? kAssertionFailure : kOk;
}

int run_symbol_check(const SymbolCheckConfig& c, const RunOptions& o) {
  pressure::CellSpec cell = c.cell;
  if (o.seed) cell.seed = *o.seed;
  const oneparticle::KineticBasis kin(cell.dimension, cell.side_length, cell.cutoff);
  const auto pot = oneparticle::sample_potential(cell.dimension, cell.side_length, cell.cell_size,
                                                 cell.amplitude, cell.vacancy, cell.seed);
  const auto eigs = oneparticle::diagonalize(kin, pot);
  const auto h = manybody::assemble_full(kin, eigs, {cell.u0, cell.sigma}, cell.thermo.mu);
  symbols::ModeBand band;
  if (c.band_labels.empty()) {
    band = symbols::build_band(kin, cell.delta);
  } else {
    std::vector<int> modes;
    for (const auto& l : c.band_labels) modes.push_back(kin.find(l));
    band = symbols::build_band(kin, modes);
  }
  if (band.size() > kBandCap) throw ConfigError("symbol-check: band exceeds two modes");

  symbols::SymbolEvaluator ev(h.terms, band, symbols::complement_basis(band, cell.n_max));
  ev.set_kappa_sign(c.kappa_sign);

  // Partial inner product <c| H |c> on a split basis with a large band cap.
  const int m = static_cast<int>(kin.size());
  const auto split = fock::build_split_basis(m, band.band, c.band_cap, cell.n_max);
  const fock::SparseMatrix hfull = manybody::to_matrix(h.terms, *split);
  const auto band_basis = fock::build_basis(band.size(), c.band_cap);
  const auto& comp = ev.complement_basis();
  std::vector<std::size_t> band_index(split->size()), comp_index(split->size());
  {
    std::vector<int> nb(band.size()), nc(std::max<std::size_t>(1, band.complement.size()), 0);
    for (std::size_t s = 0; s < split->size(); ++s) {
      for (int k = 0; k < m; ++k) {
        if (band.contains(k)) nb[band.local[k]] = split->occupation(s, k);
        else nc[band.local[k]] = split->occupation(s, k);
      }
      band_index[s] = *band_basis->index_of(nb);
      comp_index[s] = *comp->index_of(nc);
    }
  }

  std::mt19937_64 rng(c.point_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double max_dev = 0.0, max_herm = 0.0, max_tail = 0.0, max_excess = -1e300;
  const symbols::KappaBoundTerms kb{symbols::band_trace(h.one_particle, band, cell.thermo.mu),
                                    std::abs(cell.u0), 1.0};
  for (int p = 0; p < c.points; ++p) {
    symbols::CoherentPoint z(band.size());
    for (int k = 0; k < band.size(); ++k) {
      const double r = c.radius * std::sqrt(unit(rng));
      const double th = 2.0 * kPi * unit(rng);
      z[k] = std::polar(r, th);
    }
    const auto cv = symbols::coherent_vector(*band_basis, z);
    max_tail = std::max(max_tail, cv.tail_mass);
    Eigen::MatrixXcd oracle = Eigen::MatrixXcd::Zero(comp->size(), comp->size());
    for (int col = 0; col < hfull.outerSize(); ++col)
      for (fock::SparseMatrix::InnerIterator it(hfull, col); it; ++it) {
        const auto row = static_cast<std::size_t>(it.row());
        oracle(comp_index[row], comp_index[col]) +=
            std::conj(cv.amplitudes[band_index[row]]) * it.value() * cv.amplitudes[band_index[col]];
      }
    const Eigen::MatrixXcd low = ev.lower(z);
    const Eigen::MatrixXcd up = ev.upper(z);
    max_dev = std::max(max_dev, (low - oracle).cwiseAbs().maxCoeff());
    max_herm = std::max({max_herm, (low - low.adjoint()).cwiseAbs().maxCoeff(),
                         (up - up.adjoint()).cwiseAbs().maxCoeff()});
    max_excess = std::max(max_excess, symbols::kappa_bound_excess(ev, z, kb));
  }

  const bool oracle_ok = max_dev <= c.tolerance;
  const bool herm_ok = max_herm <= 1e-12;
  const bool bound_ok = max_excess <= 1e-9;
  json families = json::array();
  for (int n : ev.family_counts()) families.push_back(n);
  write_json(o, "symbol_check.json",
             {{"schema_version", kConfigSchemaVersion},
              {"band", band.band},
              {"points", c.points},
              {"max_lower_deviation", max_dev},
              {"max_hermiticity_defect", max_herm},
              {"max_coherent_tail", max_tail},
              {"max_kappa_bound_excess", max_excess},
              {"family_counts", families},
              {"oracle_ok", oracle_ok},
              {"hermitian_ok", herm_ok},
              {"kappa_bound_ok", bound_ok},
              {"pass", oracle_ok && herm_ok && bound_ok}});
  if (o.dump_terms) write_json(o, "terms.json", terms_json(h.terms, band));
  if (!(oracle_ok && herm_ok && bound_ok)) {
    std::cerr << "symbol-check: lower deviation " << max_dev << ", hermiticity " << max_herm
              << ", kappa bound excess " << max_excess << '\n';
    return kAssertionFailure;
  }
  return kOk;
}

int dispatch(const std::string& sub, const json& config, const RunOptions& o) {
  if (sub == "ids") return run_ids(parse_ids(config), o);
  if (sub == "spectrum") return run_spectrum(parse_spectrum(config), o);
  if (sub == "sandwich") return run_sandwich(parse_sandwich(config), o);
  if (sub == "quasiaverage") return run_quasiaverage(parse_quasiaverage(config), o);
  if (sub == "symbol-check") return run_symbol_check(parse_symbol_check(config), o);
  throw ConfigError("unknown subcommand " + sub);
}

int main_entry(int argc, char** argv) {
  CLI::App app{"bogolab: finite-volume c-number substitution experiments"};
  app.require_subcommand(1);
  std::string config_path;
  RunOptions opt;
  std::string out = ".";
  std::uint64_t seed = 0;
  int threads = 0;

  for (const char* name : {"ids", "spectrum", "sandwich", "quasiaverage", "symbol-check"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "override the disorder seed(s)");
    sub->add_option("--threads", threads, "worker threads (default BOGOLAB_THREADS or all cores)");
    sub->add_flag("--dump-terms", opt.dump_terms, "write the Hamiltonian term inventory");
    sub->add_flag("--timing", opt.timing, "fill the wall_time column");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  const auto* s = app.get_subcommands().front();
  if (s->count("--seed")) opt.seed = seed;
  opt.out = out;
  try {
    if (s->count("--threads")) {
      if (threads < 1) throw ConfigError("--threads: must be at least 1");
      kernels::set_thread_count(threads);
    }
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config " + config_path);
    json config;
    try {
      config = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return dispatch(sub, config, opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const AssertionFailure& e) {
    std::cerr << "assertion failed: " << e.what() << '\n';
    return kAssertionFailure;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace bogolab::cli
