#include "bogolab/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace bogolab::symbols {

ModeBand build_band(const oneparticle::KineticBasis& kinetic, double delta) {
  if (!(delta > 0.0)) throw ConfigError("band threshold delta must be positive");
  ModeBand b;
  b.delta = delta;
  b.volume = kinetic.volume();
  const int m = static_cast<int>(kinetic.size());
  b.local.assign(m, -1);
  b.in_band.assign(m, 0);
  for (int k = 0; k < m; ++k) {
    if (kinetic.energy(k) <= delta) {
      b.in_band[k] = 1;
      b.local[k] = static_cast<int>(b.band.size());
      b.band.push_back(k);
    } else {
      b.local[k] = static_cast<int>(b.complement.size());
      b.complement.push_back(k);
    }
  }
  const int d = kinetic.dimension();
  const double l = kinetic.side_length();
  b.nu_delta = oneparticle::kinetic_ids_exact(d, l, delta);
  b.nu_2delta = oneparticle::kinetic_ids_exact(d, l, 2.0 * delta);
  return b;
}

ModeBand build_band(const oneparticle::KineticBasis& kinetic, const std::vector<int>& modes) {
  if (modes.empty()) throw ConfigError("explicit band needs at least one mode");
  const int m = static_cast<int>(kinetic.size());
  std::vector<char> in(m, 0);
  double delta = 0.0;
  for (int k : modes) {
    if (k < 0 || k >= m) throw ConfigError("band mode outside the kinetic basis");
    if (in[k]) throw ConfigError("band modes must be distinct");
    in[k] = 1;
    delta = std::max(delta, kinetic.energy(k));
  }
  ModeBand b = build_band(kinetic, std::max(delta, 1e-300));
  b.band.clear();
  b.complement.clear();
  for (int k = 0; k < m; ++k) {
    b.in_band[k] = in[k];
    auto& list = in[k] ? b.band : b.complement;
    b.local[k] = static_cast<int>(list.size());
    list.push_back(k);
  }
  return b;
}

CoherentVector coherent_vector(const fock::OccupationBasis& basis, const CoherentPoint& c) {
  if (c.size() != basis.mode_count())
    throw ConfigError("coherent point dimension differs from band size");
  for (Eigen::Index k = 0; k < c.size(); ++k)
    if (!std::isfinite(c[k].real()) || !std::isfinite(c[k].imag()))
      throw ConfigError("coherent amplitudes must be finite");

  const int cap = basis.max_occupation();
  const int m = basis.mode_count();
  // Single-mode amplitudes e^{-|c|^2/2} c^n / sqrt(n!).
  std::vector<std::vector<cplx>> single(m, std::vector<cplx>(cap + 1));
  CoherentVector out;
  for (int k = 0; k < m; ++k) {
    const double x = std::norm(c[k]);
    cplx a = std::exp(-0.5 * x);
    for (int n = 0; n <= cap; ++n) {
      single[k][n] = a;
      a *= c[k] / std::sqrt(static_cast<double>(n + 1));
    }
    // Poisson tail beyond the cap.
    double term = std::exp(-x), kept = 0.0;
    for (int n = 0; n <= cap; ++n) {
      kept += term;
      term *= x / (n + 1);
    }
    out.tail_mass = std::max(out.tail_mass, std::max(0.0, 1.0 - kept));
  }
  out.amplitudes.resize(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    cplx a = 1.0;
    for (int k = 0; k < m; ++k) a *= single[k][basis.occupation(i, k)];
    out.amplitudes[static_cast<Eigen::Index>(i)] = a;
  }
  const double norm = out.amplitudes.norm();
  if (norm > 0.0) out.amplitudes /= norm;
  return out;
}

int term_family(const manybody::Term& t, const ModeBand& band) {
  auto in = [&](int k) { return band.contains(k); };
  if (t.n_create == 1 && t.n_annihilate == 1) {
    const bool bc = in(t.creators[0]), ba = in(t.annihilators[0]);
    if (bc && ba) return 1;
    if (!bc && !ba) return t.creators[0] == t.annihilators[0] ? 2 : 5;
    return bc ? 3 : 4;
  }
  if (t.n_create == 2 && t.n_annihilate == 2) {
    // creators = {k+q, k'-q}, annihilators = {k', k}
    const bool k = in(t.annihilators[1]), kp = in(t.annihilators[0]);
    const bool kq = in(t.creators[0]), kpq = in(t.creators[1]);
    const int outer = k ? (kp ? 0 : 1) : (kp ? 2 : 3);
    const int inner = kq ? (kpq ? 3 : 1) : (kpq ? 2 : 0);
    return 6 + 4 * outer + inner;
  }
  return 0;
}

fock::BasisPtr complement_basis(const ModeBand& band, int n_max) {
  return fock::build_basis(std::max<int>(1, static_cast<int>(band.complement.size())),
                           band.complement.empty() ? 0 : n_max);
}

SymbolEvaluator::SymbolEvaluator(const manybody::Polynomial& h, const ModeBand& band,
                                 fock::BasisPtr complement)
    : band_(band), basis_(std::move(complement)) {
  if (h.mode_count() != band.mode_count())
    throw ConfigError("Hamiltonian and band act on different mode sets");
  const int mc = static_cast<int>(band.complement.size());
  if (mc > 0 && basis_->mode_count() != mc)
    throw ConfigError("complement basis has the wrong mode count");

  std::map<std::array<int, 6>, std::size_t> index;
  auto block_for = [&](const std::array<int, 6>& key) -> Block& {
    auto it = index.find(key);
    if (it != index.end()) return blocks_[it->second];
    Block b;
    if (key[0] == 0 && key[3] == 0) {
      b.identity = true;
    } else {
      manybody::Term t;
      t.coeff = 1.0;
      t.n_create = key[0];
      t.n_annihilate = key[3];
      t.creators = {key[1], key[2]};
      t.annihilators = {key[4], key[5]};
      manybody::Polynomial p(basis_->mode_count());
      p.add(t);
      b.matrix = manybody::to_matrix(p, *basis_);
    }
    index.emplace(key, blocks_.size());
    blocks_.push_back(std::move(b));
    return blocks_.back();
  };

  if (h.scalar() != cplx(0.0)) {
    BandFactor f;
    f.coeff = h.scalar();
    block_for({0, -1, -1, 0, -1, -1}).factors.push_back(f);
  }
  for (const auto& t : h.terms()) {
    BandFactor f;
    f.coeff = t.coeff;
    f.family = term_family(t, band);
    std::array<int, 2> cc{-1, -1}, ca{-1, -1};
    int ncc = 0, nca = 0;
    for (int i = 0; i < t.n_create; ++i) {
      const int k = t.creators[i];
      if (band.contains(k)) f.creators[f.n_create++] = band.local[k];
      else cc[ncc++] = band.local[k];
    }
    for (int i = 0; i < t.n_annihilate; ++i) {
      const int k = t.annihilators[i];
      if (band.contains(k)) f.annihilators[f.n_annihilate++] = band.local[k];
      else ca[nca++] = band.local[k];
    }
    // Complement ladders of one kind commute; sort for a canonical key.
    if (ncc == 2 && cc[0] > cc[1]) std::swap(cc[0], cc[1]);
    if (nca == 2 && ca[0] > ca[1]) std::swap(ca[0], ca[1]);
    block_for({ncc, cc[0], cc[1], nca, ca[0], ca[1]}).factors.push_back(f);
  }
}

cplx SymbolEvaluator::lower_value(const BandFactor& f, const CoherentPoint& c) {
  cplx v = f.coeff;
  for (int i = 0; i < f.n_create; ++i) v *= std::conj(c[f.creators[i]]);
  for (int i = 0; i < f.n_annihilate; ++i) v *= c[f.annihilators[i]];
  return v;
}

cplx SymbolEvaluator::upper_value(const BandFactor& f, const CoherentPoint& c) {
  // Per band mode, (a+^m a^n)^up = sum_j (-1)^j j! C(m,j) C(n,j) cbar^(m-j) c^(n-j).
  std::array<int, 4> modes{};
  std::array<int, 4> mc{}, na{};
  int count = 0;
  auto slot = [&](int k) {
    for (int i = 0; i < count; ++i)
      if (modes[i] == k) return i;
    modes[count] = k;
    return count++;
  };
  for (int i = 0; i < f.n_create; ++i) ++mc[slot(f.creators[i])];
  for (int i = 0; i < f.n_annihilate; ++i) ++na[slot(f.annihilators[i])];

  static constexpr double binom[3][3] = {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}};
  static constexpr double fact[3] = {1, 1, 2};
  cplx v = f.coeff;
  for (int s = 0; s < count; ++s) {
    const cplx z = c[modes[s]];
    const int m = mc[s], n = na[s];
    cplx acc = 0.0;
    for (int j = 0; j <= std::min(m, n); ++j) {
      const double w = (j % 2 ? -1.0 : 1.0) * fact[j] * binom[m][j] * binom[n][j];
      acc += w * std::pow(std::conj(z), m - j) * std::pow(z, n - j);
    }
    v *= acc;
  }
  return v;
}

template <class F>
Eigen::MatrixXcd SymbolEvaluator::combine(F&& weight) const {
  const auto dim = static_cast<Eigen::Index>(basis_->size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& b : blocks_) {
    cplx w = 0.0;
    for (const auto& f : b.factors) w += weight(f);
    if (w == cplx(0.0)) continue;
    if (b.identity) out.diagonal().array() += w;
    else out += w * b.matrix;
  }
  return out;
}

Eigen::MatrixXcd SymbolEvaluator::lower(const CoherentPoint& c) const {
  return combine([&](const BandFactor& f) { return lower_value(f, c); });
}

Eigen::MatrixXcd SymbolEvaluator::kappa(const CoherentPoint& c) const {
  return combine([&](const BandFactor& f) {
    return kappa_sign_ * (upper_value(f, c) - lower_value(f, c));
  });
}

Eigen::MatrixXcd SymbolEvaluator::upper(const CoherentPoint& c) const {
  return lower(c) + kappa(c);
}

Eigen::MatrixXcd SymbolEvaluator::lower_family(int family, const CoherentPoint& c) const {
  return combine([&](const BandFactor& f) {
    return f.family == family ? lower_value(f, c) : cplx(0.0);
  });
}

cplx SymbolEvaluator::kappa_scalar(const CoherentPoint& c) const {
  cplx s = 0.0;
  for (const auto& b : blocks_)
    if (b.identity)
      for (const auto& f : b.factors) s += kappa_sign_ * (upper_value(f, c) - lower_value(f, c));
  return s;
}

std::array<int, kFamilyCount> SymbolEvaluator::family_counts() const {
  std::array<int, kFamilyCount> n{};
  for (const auto& b : blocks_)
    for (const auto& f : b.factors) ++n[f.family];
  return n;
}

double band_trace(const Eigen::MatrixXcd& h, const ModeBand& band, double mu) {
  double t = 0.0;
  for (int k : band.band) t += h(k, k).real() - mu;
  return t;
}

double kappa_bound_excess(const SymbolEvaluator& ev, const CoherentPoint& c,
                          const KappaBoundTerms& terms) {
  const ModeBand& b = ev.band();
  const double v = b.volume, nu = b.nu_delta, nu2 = b.nu_2delta, g = terms.gamma;
  const double x = nu + 0.5 * v * nu * nu + v * nu * nu2;
  const double scalar = terms.trace_band + terms.sign * g * x +
                        0.5 * g * (4.0 / v + 2.0 * nu + 2.0 * nu2) * c.squaredNorm();
  Eigen::MatrixXcd m = -ev.kappa(c);
  const auto& basis = *ev.complement_basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double n_perp = b.complement.empty() ? 0.0 : basis.total(i);
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -= scalar + 2.0 * g * nu * n_perp;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

namespace {

QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double mu0) {
  const auto n = diag.size();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  j.diagonal() = diag;
  for (Eigen::Index i = 0; i + 1 < n; ++i) j(i, i + 1) = j(i + 1, i) = off[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  if (es.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigensolver failed");
  QuadratureRule r;
  for (Eigen::Index i = 0; i < n; ++i) {
    r.nodes.push_back(es.eigenvalues()[i]);
    const double v0 = es.eigenvectors()(0, i);
    r.weights.push_back(mu0 * v0 * v0);
  }
  return r;
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw ConfigError("quadrature needs at least one node");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n), off(std::max(0, n - 1));
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  auto r = golub_welsch(diag, off, 2.0);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    r.nodes[i] = 0.5 * (b - a) * r.nodes[i] + 0.5 * (a + b);
    r.weights[i] *= 0.5 * (b - a);
  }
  return r;
}

QuadratureRule gauss_laguerre(int n) {
  if (n < 1) throw ConfigError("quadrature needs at least one node");
  Eigen::VectorXd diag(n), off(std::max(0, n - 1));
  for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) off[k - 1] = k;
  return golub_welsch(diag, off, 1.0);
}

std::vector<PlaneNode> disk_rule(int radial, int angular, double radius) {
  const auto r = gauss_legendre(radial, 0.0, radius);
  std::vector<PlaneNode> out;
  out.reserve(static_cast<std::size_t>(radial) * angular);
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    for (int j = 0; j < angular; ++j) {
      const double th = 2.0 * kPi * j / angular;
      out.push_back({std::polar(r.nodes[i], th), 2.0 * r.weights[i] * r.nodes[i] / angular});
    }
  return out;
}

std::vector<PlaneNode> gaussian_plane_rule(int radial, int angular) {
  const auto r = gauss_laguerre(radial);
  std::vector<PlaneNode> out;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    for (int j = 0; j < angular; ++j) {
      const double th = 2.0 * kPi * j / angular;
      out.push_back({std::polar(std::sqrt(r.nodes[i]), th), r.weights[i] / angular});
    }
  return out;
}

std::vector<ProductNode> product_rule(const std::vector<double>& radii, int radial, int angular) {
  std::vector<ProductNode> nodes{{CoherentPoint(0), 0.0}};
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const auto disk = disk_rule(radial, angular, radii[k]);
    std::vector<ProductNode> next;
    next.reserve(nodes.size() * disk.size());
    for (const auto& n : nodes)
      for (const auto& p : disk) {
        ProductNode q;
        q.c.resize(static_cast<Eigen::Index>(k + 1));
        q.c.head(static_cast<Eigen::Index>(k)) = n.c;
        q.c[static_cast<Eigen::Index>(k)] = p.c;
        q.log_weight = n.log_weight + std::log(p.weight);
        next.push_back(std::move(q));
      }
    nodes = std::move(next);
  }
  return nodes;
}

QuadratureResult cplane_quadrature(const std::function<cplx(const CoherentPoint&)>& f,
                                   const std::vector<double>& radii, int radial, int angular) {
  QuadratureResult r;
  for (const auto& n : product_rule(radii, radial, angular)) r.value += std::exp(n.log_weight) * f(n.c);
  for (double rad : radii) r.tail_bound += std::exp(-rad * rad);
  return r;
}

MonteCarloResult monte_carlo_plane(const std::function<double(const CoherentPoint&)>& f,
                                   const std::vector<double>& radii, std::size_t samples,
                                   std::uint64_t seed) {
  if (samples < 2) throw ConfigError("Monte Carlo needs at least two samples");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  double area = 1.0;
  for (double r : radii) area *= r * r;
  double sum = 0.0, sum2 = 0.0;
  CoherentPoint c(static_cast<Eigen::Index>(radii.size()));
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < radii.size(); ++k)
      c[static_cast<Eigen::Index>(k)] = std::polar(radii[k] * std::sqrt(uniform()), 2.0 * kPi * uniform());
    const double v = f(c);
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum2 / n - mean * mean) * n / (n - 1.0));
  return {area * mean, area * std::sqrt(var / n)};
}

}  // namespace bogolab::symbols
