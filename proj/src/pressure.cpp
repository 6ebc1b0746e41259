#include "bogolab/pressure.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <random>

#include "bogolab/kernels.hpp"

namespace bogolab::pressure {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_sum(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// All occupation vectors of `count` modes with the given total, lexicographic.
void compositions(int total, int count, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (count == 0) {
    if (total == 0) out.push_back(cur);
    return;
  }
  if (count == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int n = total; n >= 0; --n) {
    cur.push_back(n);
    compositions(total - n, count - 1, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> compositions(int total, int count) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  compositions(total, count, cur, out);
  return out;
}

double sector_log_z(const manybody::Polynomial& h, const symbols::ModeBand& band, int n_max,
                    int total, double beta) {
  const int m = band.mode_count();
  std::vector<std::vector<int>> states;
  for (int j = 0; j <= std::min(total, n_max); ++j) {
    const int nb = total - j;
    if (band.band.empty() && nb > 0) continue;
    if (band.complement.empty() && j > 0) continue;
    const auto comp = compositions(j, static_cast<int>(band.complement.size()));
    const auto bnd = compositions(nb, static_cast<int>(band.band.size()));
    for (const auto& b : bnd)
      for (const auto& c : comp) {
        std::vector<int> n(m, 0);
        for (std::size_t i = 0; i < b.size(); ++i) n[band.band[i]] = b[i];
        for (std::size_t i = 0; i < c.size(); ++i) n[band.complement[i]] = c[i];
        states.push_back(std::move(n));
      }
  }
  if (states.empty()) return kNegInf;
  std::map<std::vector<int>, Eigen::Index> index;
  for (std::size_t i = 0; i < states.size(); ++i) index.emplace(states[i], static_cast<Eigen::Index>(i));

  const auto dim = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
  mat.diagonal().array() += h.scalar();
  std::vector<int> n;
  for (Eigen::Index j = 0; j < dim; ++j)
    for (const auto& t : h.terms()) {
      n = states[static_cast<std::size_t>(j)];
      const double amp = manybody::apply_term(t, n);
      if (amp == 0.0) continue;
      auto it = index.find(n);
      if (it != index.end()) mat(it->second, j) += t.coeff * amp;
    }
  return log_trace_exp(Eigen::MatrixXcd(0.5 * (mat + mat.adjoint())), beta);
}

}  // namespace

double log_trace_exp(const Eigen::VectorXd& ev, double beta) {
  if (ev.size() == 0) return kNegInf;
  const double lo = ev.minCoeff();
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) s += std::exp(-beta * (ev[i] - lo));
  return -beta * lo + std::log(s);
}

double log_trace_exp(const Eigen::MatrixXcd& h, double beta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed in trace");
  return log_trace_exp(Eigen::VectorXd(es.eigenvalues()), beta);
}

double exact_pressure(const fock::BosonOperator& op, double beta, double volume) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  const Eigen::MatrixXcd m = Eigen::MatrixXcd(op.matrix);
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw NumericalError("exact_pressure: matrix is not hermitian");
  return log_trace_exp(Eigen::MatrixXcd(0.5 * (m + m.adjoint())), beta) / (beta * volume);
}

SectorSum::SectorSum(const manybody::Polynomial& h, const symbols::ModeBand& band, int n_max,
                     double beta)
    : beta_(beta) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (!h.conserves_number()) throw ConfigError("sector sum needs a number-conserving Hamiltonian");
  if (n_max < 0) throw ConfigError("n_max must be nonnegative");
  constexpr int kBatch = 8;
  constexpr int kLimit = 4000;
  const double negligible = std::log(1e-17);
  double total = kNegInf;
  for (int start = 0; start < kLimit; start += kBatch) {
    auto batch = kernels::evaluate_nodes(kBatch, [&](std::size_t i) {
      return pressure::sector_log_z(h, band, n_max, start + static_cast<int>(i), beta);
    });
    for (double v : batch) {
      log_z_.push_back(v);
      total = log_add(total, v);
    }
    if (band.band.empty() && start + kBatch > n_max) return;
    // Stop once the last four sectors are decreasing and negligible.
    const std::size_t s = log_z_.size();
    bool done = s >= 8;
    for (std::size_t i = s - 4; done && i < s; ++i)
      done = log_z_[i] < total + negligible && log_z_[i] < log_z_[i - 1];
    if (done) return;
  }
  throw NumericalError("grand partition function did not converge in the particle number");
}

double SectorSum::log_xi(double dmu) const {
  std::vector<double> v(log_z_.size());
  for (std::size_t n = 0; n < log_z_.size(); ++n) v[n] = log_z_[n] + beta_ * dmu * static_cast<double>(n);
  return log_sum(v);
}

double SectorSum::mean_number(double dmu) const {
  const double lx = log_xi(dmu);
  double s = 0.0;
  for (std::size_t n = 0; n < log_z_.size(); ++n)
    if (log_z_[n] != kNegInf)
      s += static_cast<double>(n) * std::exp(log_z_[n] + beta_ * dmu * static_cast<double>(n) - lx);
  return s;
}

ExactResult exact_sector_pressure(const manybody::Polynomial& h, const symbols::ModeBand& band,
                                  int n_max, const ThermoParams& tp, bool certify) {
  const SectorSum sum(h, band, n_max, tp.beta);
  const double bv = tp.beta * band.volume;
  ExactResult r;
  r.log_xi = sum.log_xi();
  r.pressure = r.log_xi / bv;
  r.density = sum.mean_number() / band.volume;
  const double step = 1e-3 * std::max(1.0, std::abs(tp.mu));
  auto diff = [&](double s) { return (sum.log_xi(s) - sum.log_xi(-s)) / (2.0 * s * bv); };
  r.density_fd = (4.0 * diff(0.5 * step) - diff(step)) / 3.0;
  r.band_cap = sum.band_cap();
  if (certify) {
    const SectorSum next(h, band, n_max + 1, tp.beta);
    r.truncation_delta = std::abs(next.log_xi() / bv - r.pressure);
  }
  return r;
}

std::optional<int> certify_nmax(const manybody::Polynomial& h, const symbols::ModeBand& band,
                                const ThermoParams& tp, int start, int limit, double tol) {
  const double bv = tp.beta * band.volume;
  double prev = SectorSum(h, band, start, tp.beta).log_xi() / bv;
  for (int n = start; n <= limit; ++n) {
    const double next = SectorSum(h, band, n + 1, tp.beta).log_xi() / bv;
    if (std::abs(next - prev) < tol) return n;
    prev = next;
  }
  return std::nullopt;
}

namespace {

void shift_diagonal(Eigen::MatrixXcd& m, const fock::OccupationBasis& basis, bool has_complement,
                    double amount_scalar, double dmu) {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double n = has_complement ? basis.total(i) : 0.0;
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -= dmu * (amount_scalar + n);
  }
}

Eigen::MatrixXcd shifted_lower(const symbols::SymbolEvaluator& ev, const symbols::CoherentPoint& c,
                               double dmu) {
  Eigen::MatrixXcd h = ev.lower(c);
  if (dmu != 0.0)
    shift_diagonal(h, *ev.complement_basis(), !ev.band().complement.empty(), c.squaredNorm(), dmu);
  return h;
}

}  // namespace

double approximating_pressure(const symbols::SymbolEvaluator& ev, const symbols::CoherentPoint& c,
                              const ThermoParams& tp, double dmu) {
  return log_trace_exp(shifted_lower(ev, c, dmu), tp.beta) / (tp.beta * ev.band().volume);
}

namespace {

struct NmResult {
  Eigen::VectorXd x;
  double f = 0.0;
  bool converged = false;
};

template <class F>
NmResult nelder_mead(F&& f, const Eigen::VectorXd& x0, double step, double tol, int max_iter) {
  const auto n = x0.size();
  std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> fs(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) xs[static_cast<std::size_t>(i + 1)][i] += step;
  for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = f(xs[i]);
  std::vector<std::size_t> order(xs.size());
  NmResult out;
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fs[a] < fs[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
    double diameter = 0.0;
    for (const auto& x : xs) diameter = std::max(diameter, (x - xs[best]).cwiseAbs().maxCoeff());
    if (fs[worst] - fs[best] < tol && diameter < 1e-6) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (i != worst) centroid += xs[i];
    centroid /= static_cast<double>(n);
    const Eigen::VectorXd xr = centroid + (centroid - xs[worst]);
    const double fr = f(xr);
    if (fr < fs[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = f(xe);
      if (fe < fr) { xs[worst] = xe; fs[worst] = fe; }
      else { xs[worst] = xr; fs[worst] = fr; }
    } else if (fr < fs[second]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      const bool outside = fr < fs[worst];
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                         : Eigen::VectorXd(centroid + 0.5 * (xs[worst] - centroid));
      const double fc = f(xc);
      if (fc < std::min(fr, fs[worst])) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (std::size_t i = 0; i < xs.size(); ++i)
          if (i != best) {
            xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
            fs[i] = f(xs[i]);
          }
      }
    }
  }
  const auto b = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  out.x = xs[b];
  out.f = fs[b];
  return out;
}

symbols::CoherentPoint to_point(const Eigen::VectorXd& x) {
  symbols::CoherentPoint c(x.size() / 2);
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = cplx(x[2 * k], x[2 * k + 1]);
  return c;
}

}  // namespace

Maximizer maximize_over_c(const symbols::SymbolEvaluator& ev, const ThermoParams& tp,
                          const OptimizerOptions& opt) {
  const int nb = ev.band().size();
  Maximizer out;
  if (nb == 0) {
    out.point = symbols::CoherentPoint(0);
    out.pressure = approximating_pressure(ev, out.point, tp);
    out.near_optimal = out.converged_restarts = 1;
    return out;
  }
  const int dim = 2 * nb;
  std::vector<Eigen::VectorXd> seeds;
  seeds.push_back(Eigen::VectorXd::Zero(dim));
  for (int i = 0; i < dim && static_cast<int>(seeds.size()) < opt.restarts; ++i) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    x[i] = 0.5 * opt.seed_radius;
    seeds.push_back(x);
  }
  const int rest = std::max(0, opt.restarts - static_cast<int>(seeds.size()));
  if (rest > 0) {
    // Latin hypercube in the box [-R, R]^dim, fixed seed.
    std::mt19937_64 rng(0x5eed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<std::vector<int>> perm(dim, std::vector<int>(rest));
    for (auto& p : perm) {
      for (int i = 0; i < rest; ++i) p[i] = i;
      for (int i = rest - 1; i > 0; --i) std::swap(p[i], p[static_cast<int>(uniform() * (i + 1))]);
    }
    for (int s = 0; s < rest; ++s) {
      Eigen::VectorXd x(dim);
      for (int i = 0; i < dim; ++i)
        x[i] = opt.seed_radius * (2.0 * (perm[i][s] + uniform()) / rest - 1.0);
      seeds.push_back(x);
    }
  }

  auto objective = [&](const Eigen::VectorXd& x) { return -approximating_pressure(ev, to_point(x), tp); };
  const auto results = kernels::evaluate_nodes(seeds.size(), [&](std::size_t i) {
    return nelder_mead(objective, seeds[i], 0.5, opt.tolerance, opt.max_iterations);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].f < results[best].f) best = i;
  // Polish from the best point with a small simplex.
  const auto polished = nelder_mead(objective, results[best].x, 0.05, opt.tolerance, opt.max_iterations);
  const NmResult& top = polished.f <= results[best].f ? polished : results[best];

  out.pressure = -top.f;
  for (const auto& r : results) {
    if (r.converged) ++out.converged_restarts;
    if (-r.f >= out.pressure - 1e-8) ++out.near_optimal;
  }
  if (out.converged_restarts == 0 && !polished.converged)
    throw NumericalError("maximize_over_c: no restart converged");
  symbols::CoherentPoint c = to_point(top.x);
  if (std::abs(c[0]) > 0.0) c *= std::polar(1.0, -std::arg(c[0]));
  out.point = c;
  return out;
}

double scan_max_pressure(const symbols::SymbolEvaluator& ev, const ThermoParams& tp, double radius,
                         int points) {
  if (ev.band().size() != 1) throw ConfigError("scan_max_pressure needs a single-mode band");
  double best = -std::numeric_limits<double>::infinity();
  symbols::CoherentPoint c(1);
  for (int i = 0; i <= points; ++i) {
    c[0] = radius * i / points;
    best = std::max(best, approximating_pressure(ev, c, tp));
  }
  return best;
}

namespace {

struct NodeValue {
  double log_low = 0.0;
  double log_up = 0.0;
  double minus_kappa = 0.0;  // <-kappa> in the Gibbs state of h_up at this node
};

NodeValue evaluate_node(const symbols::SymbolEvaluator& ev, const symbols::CoherentPoint& c,
                        double beta, double dmu) {
  const auto& basis = *ev.complement_basis();
  const bool comp = !ev.band().complement.empty();
  const int nb = ev.band().size();
  NodeValue v;
  Eigen::MatrixXcd low = ev.lower(c);
  Eigen::MatrixXcd kap = ev.kappa(c);
  if (dmu != 0.0) {
    shift_diagonal(low, basis, comp, c.squaredNorm(), dmu);
    kap.diagonal().array() += dmu * nb;
  }
  v.log_low = log_trace_exp(low, beta);
  const Eigen::MatrixXcd up = low + kap;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(up);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on upper symbol");
  const Eigen::VectorXd lam = es.eigenvalues();
  v.log_up = log_trace_exp(lam, beta);
  const double lo = lam.minCoeff();
  double z = 0.0, k = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    const double w = std::exp(-beta * (lam[i] - lo));
    const auto vec = es.eigenvectors().col(i);
    z += w;
    k += w * (-(vec.adjoint() * kap * vec)(0, 0)).real();
  }
  v.minus_kappa = k / z;
  return v;
}

struct RuleSums {
  double log_low = kNegInf;
  double log_up = kNegInf;
  double minus_kappa = 0.0;
};

RuleSums integrate(const symbols::SymbolEvaluator& ev, double beta, double dmu,
                   const std::vector<double>& radii, int radial, int angular) {
  const auto nodes = symbols::product_rule(radii, radial, angular);
  const auto values = kernels::evaluate_nodes(
      nodes.size(), [&](std::size_t i) { return evaluate_node(ev, nodes[i].c, beta, dmu); });
  std::vector<double> lo(nodes.size()), up(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    lo[i] = nodes[i].log_weight + values[i].log_low;
    up[i] = nodes[i].log_weight + values[i].log_up;
  }
  RuleSums s;
  s.log_low = log_sum(lo);
  s.log_up = log_sum(up);
  for (std::size_t i = 0; i < nodes.size(); ++i) s.minus_kappa += std::exp(up[i] - s.log_up) * values[i].minus_kappa;
  return s;
}

double slice_log(const symbols::SymbolEvaluator& ev, symbols::CoherentPoint c, int mode, double r,
                 double beta) {
  c[mode] = r;
  const NodeValue v = evaluate_node(ev, c, beta, 0.0);
  return std::max(v.log_low, v.log_up);
}

}  // namespace

std::vector<double> integration_radii(const symbols::SymbolEvaluator& ev, const ThermoParams& tp,
                                      const symbols::CoherentPoint& center) {
  std::vector<double> radii;
  for (int k = 0; k < ev.band().size(); ++k) {
    double r = std::max(4.0, 2.0 * std::abs(center[k]) + 4.0);
    double peak = kNegInf;
    for (double s = 0.0; s <= r; s += 0.25) peak = std::max(peak, slice_log(ev, center, k, s, tp.beta));
    while (slice_log(ev, center, k, r, tp.beta) > peak - 30.0) {
      r += 1.0;
      if (r > 80.0) throw NumericalError("integrand does not decay in the c-plane");
    }
    radii.push_back(r);
  }
  return radii;
}

IntegratedResult integrated_pressures(const symbols::SymbolEvaluator& ev, const ThermoParams& tp,
                                      const symbols::CoherentPoint& center,
                                      const QuadratureOptions& q, double dmu,
                                      const std::vector<double>& radii_in) {
  if (ev.band().size() > 2)
    throw ConfigError("quadrature path supports at most two band modes; use Monte Carlo");
  IntegratedResult r;
  r.radii = radii_in.empty() ? integration_radii(ev, tp, center) : radii_in;
  const RuleSums fine = integrate(ev, tp.beta, dmu, r.radii, q.radial, q.angular);
  const RuleSums coarse = integrate(ev, tp.beta, dmu, r.radii, q.coarse_radial, q.coarse_angular);
  r.log_xi_low = fine.log_low;
  r.log_xi_up = fine.log_up;
  r.beta_minus_kappa_up = tp.beta * fine.minus_kappa;
  // Rim values were forced below e^-30 of the peak; the disk area bounds the tail.
  double tail = 0.0;
  for (double rad : r.radii) tail += std::exp(-30.0) * rad * rad;
  r.error_low = std::abs(std::expm1(fine.log_low - coarse.log_low)) + tail;
  r.error_up = std::abs(std::expm1(fine.log_up - coarse.log_up)) + tail;
  return r;
}

double literal_k(const symbols::ModeBand& band, double trace_band, double gamma, double beta,
                 double d_mu_log_low) {
  const double v = band.volume, nu = band.nu_delta, nu2 = band.nu_2delta, bv = beta * v;
  return (trace_band - gamma * nu * (1.0 - 4.0 * v * nu2 + 0.5 * v * nu + v * nu2)) / bv +
         4.0 * gamma * nu2 * d_mu_log_low / bv;
}

ErrorBudget error_budget(const symbols::SymbolEvaluator& ev, const Eigen::MatrixXcd& one_particle,
                         const ThermoParams& tp, double gamma, const Maximizer& max,
                         const IntegratedResult& integrated, const QuadratureOptions& q) {
  const auto& band = ev.band();
  const double v = band.volume, nu = band.nu_delta, nu2 = band.nu_2delta, beta = tp.beta;
  const double bv = beta * v;
  ErrorBudget b;
  b.trace_band = symbols::band_trace(one_particle, band, tp.mu);

  const double step = 1e-3 * std::max(1.0, std::abs(tp.mu));
  auto diff = [&](double s) {
    const double up = integrated_pressures(ev, tp, max.point, q, s, integrated.radii).log_xi_low;
    const double dn = integrated_pressures(ev, tp, max.point, q, -s, integrated.radii).log_xi_low;
    return (up - dn) / (2.0 * s);
  };
  b.d_mu_log_low = (4.0 * diff(0.5 * step) - diff(step)) / 3.0;

  b.k_literal = literal_k(band, b.trace_band, gamma, beta, b.d_mu_log_low);
  b.k_rigorous = (integrated.log_xi_low + integrated.beta_minus_kappa_up) / bv - max.pressure;
  b.m_value = b.trace_band + gamma * nu * (1.0 + 0.5 * v * nu + nu2);

  const double lhs = integrated.log_xi_low / bv;
  const double dp = b.d_mu_log_low / bv;
  b.bound_slack = std::numeric_limits<double>::quiet_NaN();
  if (dp > 0.0 && nu > 0.0) {
    double best = -std::numeric_limits<double>::infinity();
    for (double alpha : {1.25, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0}) {
      const double rhs = max.pressure - std::log(1.0 - 1.0 / alpha) / bv +
                         nu / beta * std::log(alpha * dp) + nu / beta -
                         0.5 / beta * std::log(v) / v - nu / beta * std::log(nu) -
                         0.5 / bv * std::log(nu);
      best = std::max(best, rhs - lhs);
    }
    b.bound_slack = best;
  }
  return b;
}

CellReport run_cell(const CellSpec& spec, const CellOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(spec.thermo.beta > 0.0)) throw ConfigError("beta must be positive");
  const oneparticle::KineticBasis kinetic(spec.dimension, spec.side_length, spec.cutoff);
  const auto pot = oneparticle::sample_potential(spec.dimension, spec.side_length, spec.cell_size,
                                                 spec.amplitude, spec.vacancy, spec.seed);
  const auto eigs = oneparticle::diagonalize(kinetic, pot);
  const manybody::InteractionKernel kernel{spec.u0, spec.sigma};
  const auto h = manybody::assemble_full(kinetic, eigs, kernel, spec.thermo.mu);
  const auto band = symbols::build_band(kinetic, spec.delta);
  symbols::SymbolEvaluator ev(h.terms, band, symbols::complement_basis(band, spec.n_max));
  if (opt.flip_kappa) ev.set_kappa_sign(-1.0);

  CellReport r;
  r.spec = spec;
  r.band_size = band.size();
  r.exact = exact_sector_pressure(h.terms, band, spec.n_max, spec.thermo, true);
  r.max = maximize_over_c(ev, spec.thermo, opt.optimizer);
  r.integrated = integrated_pressures(ev, spec.thermo, r.max.point, opt.quadrature);
  r.budget = error_budget(ev, h.one_particle, spec.thermo, kernel.bound(), r.max, r.integrated,
                          opt.quadrature);
  const double bv = spec.thermo.beta * band.volume;
  r.p_low_int = r.integrated.log_xi_low / bv;
  r.p_up_int = r.integrated.log_xi_up / bv;

  const double lx = r.exact.log_xi;
  r.sandwich_ok = lx - r.integrated.log_xi_low > r.integrated.error_low &&
                  r.integrated.log_xi_up - lx > r.integrated.error_up;
  r.max_bound_ok = r.max.pressure <= r.exact.pressure + 1e-9;
  r.residual_ok = r.exact.pressure - r.max.pressure <= r.budget.k_literal + 1e-6;
  r.bogoliubov_ok = r.integrated.log_xi_up - r.integrated.log_xi_low <=
                    r.integrated.beta_minus_kappa_up +
                        2.0 * (r.integrated.error_low + r.integrated.error_up);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv_header(std::ostream& os) {
  os << "# schema_version=" << kCsvSchemaVersion << '\n'
     << "d,l,seed,delta,beta,mu,N_max,p_exact,p_low_max,p_low_int,p_up_int,K,M,density,wall_time\n";
}

void write_csv_row(std::ostream& os, const CellReport& r, bool with_time) {
  const auto& s = r.spec;
  os << s.dimension << ',' << num(s.side_length) << ',' << s.seed << ',' << num(s.delta) << ','
     << num(s.thermo.beta) << ',' << num(s.thermo.mu) << ',' << s.n_max << ','
     << num(r.exact.pressure) << ',' << num(r.max.pressure) << ',' << num(r.p_low_int) << ','
     << num(r.p_up_int) << ',' << num(r.budget.k_literal) << ',' << num(r.budget.m_value) << ','
     << num(r.exact.density) << ',';
  if (with_time) os << num(r.wall_seconds);
  os << '\n';
}

}  // namespace bogolab::pressure
