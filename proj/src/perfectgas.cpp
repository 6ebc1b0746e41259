#include "bogolab/perfectgas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bogolab/kernels.hpp"
#include "bogolab/symbols.hpp"

namespace bogolab::perfectgas {

AnisotropicBox AnisotropicBox::make(const std::array<double, 3>& alpha, double volume) {
  if (!(volume > 0.0)) throw ConfigError("box volume must be positive");
  if (std::abs(alpha[0] + alpha[1] + alpha[2] - 1.0) > 1e-12)
    throw ConfigError("box exponents must sum to 1");
  if (!(alpha[0] >= alpha[1] && alpha[1] >= alpha[2] && alpha[2] > 0.0))
    throw ConfigError("box exponents must satisfy alpha_x >= alpha_y >= alpha_z > 0");
  return {alpha, volume};
}

double AnisotropicBox::side(int axis) const { return std::pow(volume, alpha[axis]); }

double AnisotropicBox::axis_unit(int axis) const {
  const double k = 2.0 * kPi / side(axis);
  return 0.5 * k * k;
}

double AnisotropicBox::energy(const Label& n) const {
  double e = 0.0;
  for (int a = 0; a < 3; ++a) e += axis_unit(a) * n[a] * n[a];
  return e;
}

namespace {

struct Weighted {
  double energy;
  double weight;
};

// Nondecreasing g-tuples in [0, n] over axes sharing the unit b, with the
// number of signed, permuted labels they stand for.
std::vector<Weighted> group_energies(int g, int n, double b) {
  std::vector<Weighted> out;
  auto sign_weight = [](int v) { return v > 0 ? 2.0 : 1.0; };
  if (g == 1) {
    for (int i = 0; i <= n; ++i) out.push_back({b * i * i, sign_weight(i)});
  } else if (g == 2) {
    for (int i = 0; i <= n; ++i)
      for (int j = i; j <= n; ++j)
        out.push_back({b * (i * i + j * j), sign_weight(i) * sign_weight(j) * (i == j ? 1.0 : 2.0)});
  } else {
    for (int i = 0; i <= n; ++i)
      for (int j = i; j <= n; ++j)
        for (int k = j; k <= n; ++k) {
          const double perms = (i == j && j == k) ? 1.0 : (i == j || j == k) ? 3.0 : 6.0;
          out.push_back({b * (i * i + j * j + k * k),
                         sign_weight(i) * sign_weight(j) * sign_weight(k) * perms});
        }
  }
  return out;
}

}  // namespace

BoseSum::BoseSum(const AnisotropicBox& box, double beta, double tau) : box_(box), beta_(beta) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  std::array<double, 3> b{};
  std::array<int, 3> n{};
  for (int a = 0; a < 3; ++a) {
    b[a] = box.axis_unit(a);
    n[a] = static_cast<int>(std::ceil(std::sqrt(tau / b[a])));
  }
  explicit_cutoff_ = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) explicit_cutoff_ = std::min(explicit_cutoff_, b[a] * (n[a] + 1.0) * (n[a] + 1.0));

  // Group axes with identical units; alpha is sorted so equal axes are adjacent.
  std::vector<std::vector<Weighted>> groups;
  for (int a = 0; a < 3;) {
    int e = a + 1;
    while (e < 3 && box.alpha[e] == box.alpha[a]) ++e;
    const int len = e - a;
    const int nmax = *std::max_element(n.begin() + a, n.begin() + e);
    groups.push_back(group_energies(len, nmax, b[a]));
    a = e;
  }
  std::vector<Weighted> all{{0.0, 1.0}};
  for (const auto& g : groups) {
    std::vector<Weighted> next;
    next.reserve(all.size() * g.size());
    for (const auto& x : all)
      for (const auto& y : g) next.push_back({x.energy + y.energy, x.weight * y.weight});
    all = std::move(next);
  }
  std::stable_sort(all.begin(), all.end(), [](const Weighted& x, const Weighted& y) { return x.energy < y.energy; });
  energies_.reserve(all.size());
  weights_.reserve(all.size());
  for (const auto& w : all) {
    energies_.push_back(w.energy);
    weights_.push_back(w.weight);
  }

  // Remainder: sum_j exp(j beta mu) R_j with R_j = r_x th_y th_z + t_x r_y th_z + t_x t_y r_z.
  const double eps_out = explicit_cutoff_;
  const int jmax = static_cast<int>(std::ceil(40.0 / (beta * eps_out))) + 1;
  remainder_.assign(jmax, 0.0);
  for (int j = 1; j <= jmax; ++j) {
    std::array<double, 3> t{}, r{};
    for (int a = 0; a < 3; ++a) {
      const double x = j * beta * b[a];
      double s = 1.0;
      for (int m = 1; m <= n[a]; ++m) s += 2.0 * std::exp(-x * m * m);
      double rs = 0.0;
      for (long long m = n[a] + 1;; ++m) {
        const double term = 2.0 * std::exp(-x * static_cast<double>(m * m));
        rs += term;
        if (term < 1e-20 * (s + rs)) break;
      }
      t[a] = s;
      r[a] = rs;
    }
    const double thy = t[1] + r[1], thz = t[2] + r[2];
    remainder_[j - 1] = r[0] * thy * thz + t[0] * r[1] * thz + t[0] * t[1] * r[2];
  }
}

double BoseSum::density(double mu) const {
  if (!(mu < 0.0)) throw ConfigError("Bose sum needs mu below the lowest mode energy 0");
  double s = kernels::bose_sum(energies_, weights_, beta_, mu);
  for (std::size_t j = 0; j < remainder_.size(); ++j)
    s += std::exp(static_cast<double>(j + 1) * beta_ * mu) * remainder_[j];
  return s / box_.volume;
}

double BoseSum::window_density(double mu, double window) const {
  if (window > explicit_cutoff_) throw ConfigError("window exceeds the explicitly summed modes");
  if (!(mu < 0.0)) throw ConfigError("Bose sum needs mu below the lowest mode energy 0");
  const auto end = std::lower_bound(energies_.begin(), energies_.end(), window);
  const auto n = static_cast<std::size_t>(end - energies_.begin());
  return kernels::bose_sum(std::span(energies_).first(n), std::span(weights_).first(n), beta_, mu) /
         box_.volume;
}

double BoseSum::mode_density(double eps, double mu) const {
  return 1.0 / (box_.volume * std::expm1(beta_ * (eps - mu)));
}

double density_function(const BoseSum& sum, double mu, double eta_abs, double eps_source) {
  double d = sum.density(mu);
  if (eta_abs != 0.0) d += eta_abs * eta_abs / ((eps_source - mu) * (eps_source - mu));
  return d;
}

double solve_mu(const BoseSum& sum, double rho_bar, double eta_abs, double eps_source) {
  if (!(rho_bar > 0.0)) throw ConfigError("target density must be positive");
  auto rho = [&](double mu) { return density_function(sum, mu, eta_abs, eps_source); };
  double lo = -1.0, hi = 0.0;
  while (rho(lo) > rho_bar) {
    lo *= 2.0;
    if (lo < -1e8) throw NumericalError("solve_mu: cannot bracket the root");
  }
  for (int it = 0; it < 2000; ++it) {
    double m;
    if (hi < 0.0 && lo / hi > 4.0) m = -std::sqrt(lo * hi);
    else m = 0.5 * (lo + hi);
    if (!(m < hi && m > lo)) break;
    if (rho(m) > rho_bar) hi = m;
    else lo = m;
    if (hi < 0.0 && hi - lo <= 1e-15 * std::abs(lo)) break;
  }
  if (!(hi < 0.0)) throw NumericalError("solve_mu: bisection did not leave mu = 0");
  return 0.5 * (lo + hi);
}

namespace {

// int_a^b f by 32-point Gauss-Legendre with recursive halving.
template <class F>
double adaptive(F&& f, double a, double b, double tol, int depth = 0) {
  static const auto rule = symbols::gauss_legendre(32, -1.0, 1.0);
  auto gl = [&](double x0, double x1) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      s += rule.weights[i] * f(0.5 * (x1 - x0) * rule.nodes[i] + 0.5 * (x0 + x1));
    return 0.5 * (x1 - x0) * s;
  };
  const double whole = gl(a, b);
  const double mid = 0.5 * (a + b);
  const double halves = gl(a, mid) + gl(mid, b);
  if (std::abs(whole - halves) <= tol * std::abs(halves) || depth > 30) return halves;
  return adaptive(f, a, mid, tol, depth + 1) + adaptive(f, mid, b, tol, depth + 1);
}

}  // namespace

double bulk_density(double beta, double mu) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (mu > 0.0) throw ConfigError("bulk density needs mu <= 0");
  // eps = t^2 removes the square-root singularity of the Weyl measure at 0.
  const double c3 = oneparticle::weyl_constant(3);
  auto f = [&](double t) { return 3.0 * c3 * t * t / std::expm1(beta * (t * t - mu)); };
  const double top = std::sqrt(80.0 / beta);
  double s = 0.0;
  const double split = std::sqrt(1.0 / beta);
  s += adaptive(f, 0.0, split, 1e-13);
  s += adaptive(f, split, top, 1e-13);
  return s;
}

double critical_density(double beta, int dimension) {
  if (dimension < 3) return std::numeric_limits<double>::infinity();
  if (dimension > 3) throw ConfigError("critical density implemented for d <= 3");
  return bulk_density(beta, 0.0);
}

double bulk_mu(double beta, double rho) {
  if (!(rho > 0.0)) throw ConfigError("density must be positive");
  if (rho >= critical_density(beta)) throw ConfigError("no bulk root above the critical density");
  double lo = -1.0, hi = 0.0;
  while (bulk_density(beta, lo) > rho) lo *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
    const double m = 0.5 * (lo + hi);
    if (bulk_density(beta, m) > rho) hi = m;
    else lo = m;
  }
  return 0.5 * (lo + hi);
}

PowerFit fit_inverse_power(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw ConfigError("power fit needs >= 3 points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXd yy(n);
  for (Eigen::Index i = 0; i < n; ++i) yy[i] = y[static_cast<std::size_t>(i)];
  PowerFit best;
  best.residual = std::numeric_limits<double>::infinity();
  for (int g = 0; g < 1000; ++g) {
    const double gamma = 0.02 + (1.5 - 0.02) * g / 999.0;
    Eigen::MatrixXd a(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, 0) = 1.0;
      a(i, 1) = std::pow(x[static_cast<std::size_t>(i)], -gamma);
    }
    const Eigen::Vector2d c = a.colPivHouseholderQr().solve(yy);
    const double res = (a * c - yy).squaredNorm();
    if (res < best.residual) best = {c[0], c[1], gamma, res};
  }
  return best;
}

SqrtFit fit_sqrt_series(const std::vector<double>& eta, const std::vector<double>& y) {
  if (eta.size() != y.size() || eta.size() < 3) throw ConfigError("series fit needs >= 3 points");
  const auto n = static_cast<Eigen::Index>(eta.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd yy(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = eta[static_cast<std::size_t>(i)];
    a(i, 0) = 1.0;
    a(i, 1) = std::sqrt(e);
    a(i, 2) = e;
    yy[i] = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(yy);
  return {c[0], c[1], c[2]};
}

std::string to_string(Condensation c) {
  switch (c) {
    case Condensation::none: return "none";
    case Condensation::type_i: return "I";
    case Condensation::type_ii: return "II";
    case Condensation::type_iii: return "III";
    case Condensation::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double WindowRule::window(const AnisotropicBox& box) const {
  if (kind == Kind::power_law) return std::pow(box.volume, -exponent);
  double lowest = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) lowest = std::min(lowest, box.axis_unit(a));
  return multiple * lowest;
}

namespace {

bool monotone(const std::vector<double>& v) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    up = up && v[i] >= v[i - 1];
    down = down && v[i] <= v[i - 1];
  }
  return up || down;
}

std::vector<Label> lowest_labels(const AnisotropicBox& box, int count) {
  std::vector<Label> labels;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c) labels.push_back({a, b, c});
  std::stable_sort(labels.begin(), labels.end(), [&](const Label& x, const Label& y) {
    const double ex = box.energy(x), ey = box.energy(y);
    return ex != ey ? ex < ey : x < y;
  });
  labels.resize(static_cast<std::size_t>(count));
  return labels;
}

}  // namespace

CondensateReport classify_condensation(const std::array<double, 3>& alpha, double beta,
                                       double rho_bar, const std::vector<double>& volumes,
                                       const WindowRule& rule, double threshold) {
  if (volumes.size() < 3) throw ConfigError("classification needs at least three volumes");
  CondensateReport rep;
  rep.alpha = alpha;
  rep.beta = beta;
  rep.rho_bar = rho_bar;
  rep.rho_c = critical_density(beta);
  const double excess = rho_bar - rep.rho_c;
  const double ref = excess > 0.0 ? excess : rho_bar;

  const auto largest = AnisotropicBox::make(alpha, *std::max_element(volumes.begin(), volumes.end()));
  rep.tracked = lowest_labels(largest, 8);

  std::vector<double> vs, ground, window;
  std::vector<std::vector<double>> modes(rep.tracked.size());
  for (double v : volumes) {
    const auto box = AnisotropicBox::make(alpha, v);
    const BoseSum sum(box, beta);
    VolumePoint p;
    p.volume = v;
    p.mu = solve_mu(sum, rho_bar);
    p.ground_density = sum.mode_density(0.0, p.mu);
    p.window_density = sum.window_density(p.mu, rule.window(box));
    for (std::size_t i = 0; i < rep.tracked.size(); ++i) {
      const double d = sum.mode_density(box.energy(rep.tracked[i]), p.mu);
      p.mode_densities.push_back(d);
      p.max_mode_density = std::max(p.max_mode_density, d);
      modes[i].push_back(d);
    }
    vs.push_back(v);
    ground.push_back(p.ground_density);
    window.push_back(p.window_density);
    rep.points.push_back(std::move(p));
  }
  rep.ground_extrapolated = fit_inverse_power(vs, ground).limit;
  rep.window_extrapolated = fit_inverse_power(vs, window).limit;
  rep.monotone = monotone(ground) && monotone(window);

  bool non_macro_decreasing = true;
  for (const auto& m : modes) {
    if (fit_inverse_power(vs, m).limit > threshold * ref) ++rep.macroscopic_modes;
    else non_macro_decreasing = non_macro_decreasing && m.back() <= m.front();
  }
  if (!rep.monotone || !non_macro_decreasing) {
    rep.classification = Condensation::inconclusive;
  } else if (rep.macroscopic_modes == 1) {
    rep.classification = Condensation::type_i;
  } else if (rep.macroscopic_modes >= 2) {
    rep.classification = Condensation::type_ii;
  } else if (excess > 0.0 && rep.window_extrapolated > 0.5 * excess) {
    rep.classification = Condensation::type_iii;
  } else {
    rep.classification = Condensation::none;
  }
  return rep;
}

QuasiAverageReport quasi_average_sweep(const QuasiAverageConfig& cfg) {
  if (cfg.order == LimitOrder::source_first)
    throw ConfigError("the source must be switched off after the volume limit (volume_first)");
  if (cfg.etas.size() < 3 || cfg.volumes.size() < 3)
    throw ConfigError("quasi-average sweep needs at least three etas and three volumes");
  for (double e : cfg.etas)
    if (!(e > 0.0)) throw ConfigError("source amplitudes must be positive");

  QuasiAverageReport rep;
  rep.rho_c = critical_density(cfg.beta);
  const bool ground_source = cfg.source == Label{0, 0, 0};

  std::vector<std::vector<double>> src(cfg.etas.size()), gnd(cfg.etas.size());
  rep.source_term_by_eta.assign(cfg.etas.size(), 0.0);
  for (double v : cfg.volumes) {
    const auto box = AnisotropicBox::make(cfg.alpha, v);
    const BoseSum sum(box, cfg.beta);
    Label label = cfg.source;
    if (cfg.scaling == SourceScaling::fixed_energy && !ground_source) {
      const double s = std::sqrt(cfg.source_energy / box.energy(cfg.source));
      for (int a = 0; a < 3; ++a) label[a] = static_cast<int>(std::lround(cfg.source[a] * s));
    }
    const double eps = box.energy(label);
    for (std::size_t i = 0; i < cfg.etas.size(); ++i) {
      QuasiAveragePoint p;
      p.eta = cfg.etas[i];
      p.volume = v;
      p.source_energy = eps;
      p.mu = solve_mu(sum, cfg.rho_bar, p.eta, eps);
      const double term = p.eta * p.eta / ((eps - p.mu) * (eps - p.mu));
      p.source_density = sum.mode_density(eps, p.mu) + term;
      p.ground_density = ground_source ? p.source_density : sum.mode_density(0.0, p.mu);
      src[i].push_back(p.source_density);
      gnd[i].push_back(p.ground_density);
      rep.source_term_by_eta[i] = term;
      rep.points.push_back(p);
    }
  }
  for (std::size_t i = 0; i < cfg.etas.size(); ++i) {
    rep.source_by_eta.push_back(fit_inverse_power(cfg.volumes, src[i]).limit);
    rep.ground_by_eta.push_back(fit_inverse_power(cfg.volumes, gnd[i]).limit);
  }
  rep.source_limit = fit_sqrt_series(cfg.etas, rep.source_by_eta).limit;
  rep.ground_limit = fit_sqrt_series(cfg.etas, rep.ground_by_eta).limit;
  return rep;
}

}  // namespace bogolab::perfectgas
