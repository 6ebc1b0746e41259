#include "bogolab/oneparticle.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace bogolab::oneparticle {

namespace {

double unit_interval(std::mt19937_64& rng) {
  // 53 random bits; fixed mapping so sampled fields do not depend on the
  // standard library's distribution implementation.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int label_norm2(const Label& n) { return n[0] * n[0] + n[1] * n[1] + n[2] * n[2]; }

}  // namespace

KineticBasis::KineticBasis(int dimension, double side_length, int cutoff)
    : dim_(dimension), side_(side_length), cutoff_(cutoff) {
  if (dimension < 1 || dimension > 3) throw ConfigError("dimension must be 1, 2 or 3");
  if (!(side_length > 0.0)) throw ConfigError("side length must be positive");
  if (cutoff < 1) throw ConfigError("mode cutoff must be >= 1");
  const int ny = dimension >= 2 ? cutoff : 0;
  const int nz = dimension >= 3 ? cutoff : 0;
  for (int a = -cutoff; a <= cutoff; ++a)
    for (int b = -ny; b <= ny; ++b)
      for (int c = -nz; c <= nz; ++c) labels_.push_back({a, b, c});
  std::ranges::sort(labels_, [](const Label& x, const Label& y) {
    const int nx = label_norm2(x), ny2 = label_norm2(y);
    if (nx != ny2) return nx < ny2;
    return x < y;
  });
  const double unit = 2.0 * kPi / side_;
  energies_.reserve(labels_.size());
  for (const auto& n : labels_) energies_.push_back(0.5 * unit * unit * label_norm2(n));
}

double KineticBasis::volume() const { return std::pow(side_, dim_); }

int KineticBasis::norm2(std::size_t i) const { return label_norm2(labels_[i]); }

Eigen::Vector3d KineticBasis::momentum(std::size_t i) const {
  const double unit = 2.0 * kPi / side_;
  return {unit * labels_[i][0], unit * labels_[i][1], unit * labels_[i][2]};
}

int KineticBasis::find(const Label& label) const {
  for (int j = dim_; j < 3; ++j)
    if (label[j] != 0) return -1;
  for (int j = 0; j < dim_; ++j)
    if (std::abs(label[j]) > cutoff_) return -1;
  auto it = std::ranges::find(labels_, label);
  return static_cast<int>(it - labels_.begin());
}

KineticBasis build_kinetic(int dimension, double side_length, int cutoff) {
  return KineticBasis(dimension, side_length, cutoff);
}

double RandomPotential::mean() const {
  if (cell_values.empty()) return 0.0;
  return std::accumulate(cell_values.begin(), cell_values.end(), 0.0) /
         static_cast<double>(cell_values.size());
}

bool RandomPotential::identically_zero() const {
  return std::ranges::all_of(cell_values, [](double v) { return v == 0.0; });
}

RandomPotential sample_potential(int dimension, double side_length, double cell_size,
                                 double amplitude, double vacancy_probability,
                                 std::uint64_t seed) {
  if (dimension < 1 || dimension > 3) throw ConfigError("dimension must be 1, 2 or 3");
  if (!(side_length > 0.0) || !(cell_size > 0.0))
    throw ConfigError("side length and cell size must be positive");
  if (!(amplitude >= 0.0)) throw ConfigError("potential amplitude must be non-negative");
  if (!(vacancy_probability >= 0.0) || !(vacancy_probability < 1.0))
    throw ConfigError("vacancy probability must lie in [0, 1)");
  RandomPotential pot;
  pot.dimension = dimension;
  pot.side_length = side_length;
  pot.cells_per_axis = std::max(1, static_cast<int>(std::lround(side_length / cell_size)));
  pot.amplitude = amplitude;
  pot.vacancy_probability = vacancy_probability;
  pot.seed = seed;
  std::size_t count = 1;
  for (int j = 0; j < dimension; ++j) count *= static_cast<std::size_t>(pot.cells_per_axis);
  pot.cell_values.resize(count);
  std::mt19937_64 rng(seed);
  for (auto& v : pot.cell_values) v = unit_interval(rng) < vacancy_probability ? 0.0 : amplitude;
  return pot;
}

RandomPotential constant_potential(int dimension, double side_length, double value) {
  RandomPotential pot;
  pot.dimension = dimension;
  pot.side_length = side_length;
  pot.cells_per_axis = 1;
  pot.amplitude = value;
  pot.cell_values = {value};
  return pot;
}

void write_potential(std::ostream& os, const RandomPotential& pot) {
  os.precision(17);
  os << pot.dimension << ' ' << pot.side_length << ' ' << pot.cell_size() << ' '
     << pot.amplitude << ' ' << pot.vacancy_probability << ' ' << pot.seed << '\n';
  for (double v : pot.cell_values) os << v << '\n';
}

RandomPotential read_potential(std::istream& is) {
  RandomPotential pot;
  double cell_size = 0.0;
  std::string header;
  if (!std::getline(is, header)) throw ConfigError("potential file: missing header");
  std::istringstream hs(header);
  if (!(hs >> pot.dimension >> pot.side_length >> cell_size >> pot.amplitude >>
        pot.vacancy_probability >> pot.seed))
    throw ConfigError("potential file: malformed header");
  if (pot.dimension < 1 || pot.dimension > 3 || !(cell_size > 0.0))
    throw ConfigError("potential file: invalid geometry");
  pot.cells_per_axis = std::max(1, static_cast<int>(std::lround(pot.side_length / cell_size)));
  std::size_t count = 1;
  for (int j = 0; j < pot.dimension; ++j) count *= static_cast<std::size_t>(pot.cells_per_axis);
  pot.cell_values.reserve(count);
  double v = 0.0;
  while (pot.cell_values.size() < count && (is >> v)) pot.cell_values.push_back(v);
  if (pot.cell_values.size() != count) throw ConfigError("potential file: wrong value count");
  return pot;
}

Eigen::MatrixXcd potential_matrix(const RandomPotential& pot, const KineticBasis& basis) {
  if (pot.dimension != basis.dimension() ||
      std::abs(pot.side_length - basis.side_length()) > 1e-12 * basis.side_length())
    throw ConfigError("potential and kinetic basis have different geometry");
  const int d = basis.dimension();
  const int c = basis.cutoff();
  const int span = 4 * c + 1;  // label differences in [-2c, 2c]
  const int cells = pot.cells_per_axis;
  const double l = pot.side_length;
  const double w = pot.cell_size();

  // Per-axis factor (1/l) * integral over cell j of exp(-i 2 pi m x / l).
  Eigen::MatrixXcd axis(span, cells);
  for (int mi = 0; mi < span; ++mi) {
    const int m = mi - 2 * c;
    for (int j = 0; j < cells; ++j) {
      const double a = -0.5 * l + j * w;
      if (m == 0) {
        axis(mi, j) = w / l;
      } else {
        const double theta = 2.0 * kPi * m / l;
        const cplx e0 = std::polar(1.0, -theta * a);
        const cplx e1 = std::polar(1.0, -theta * (a + w));
        axis(mi, j) = (e0 - e1) / (cplx(0.0, theta) * l);
      }
    }
  }

  // Fourier coefficients of v on the difference lattice.
  const int sy = d >= 2 ? span : 1, sz = d >= 3 ? span : 1;
  const int cy = d >= 2 ? cells : 1, cz = d >= 3 ? cells : 1;
  std::vector<cplx> coeff(static_cast<std::size_t>(span) * sy * sz, cplx(0.0));
  for (int mx = 0; mx < span; ++mx)
    for (int my = 0; my < sy; ++my)
      for (int mz = 0; mz < sz; ++mz) {
        cplx acc = 0.0;
        for (int jx = 0; jx < cells; ++jx)
          for (int jy = 0; jy < cy; ++jy)
            for (int jz = 0; jz < cz; ++jz) {
              const double v = pot.cell_values[(static_cast<std::size_t>(jx) * cy + jy) * cz + jz];
              if (v == 0.0) continue;
              cplx f = axis(mx, jx);
              if (d >= 2) f *= axis(my, jy);
              if (d >= 3) f *= axis(mz, jz);
              acc += v * f;
            }
        coeff[(static_cast<std::size_t>(mx) * sy + my) * sz + mz] = acc;
      }

  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto& la = basis.label(a);
      const auto& lb = basis.label(b);
      const int mx = la[0] - lb[0] + 2 * c;
      const int my = d >= 2 ? la[1] - lb[1] + 2 * c : 0;
      const int mz = d >= 3 ? la[2] - lb[2] + 2 * c : 0;
      out(a, b) = coeff[(static_cast<std::size_t>(mx) * sy + my) * sz + mz];
    }
  // Exact hermitian symmetry.
  const Eigen::MatrixXcd sym = 0.5 * (out + out.adjoint());
  return sym;
}

Eigen::MatrixXcd one_particle_matrix(const KineticBasis& basis, const RandomPotential& pot) {
  Eigen::MatrixXcd h = potential_matrix(pot, basis);
  for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) += basis.energy(static_cast<std::size_t>(i));
  return h;
}

SchrodingerEigensystem diagonalize(const Eigen::MatrixXcd& hermitian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian);
  if (solver.info() != Eigen::Success)
    throw NumericalError("one-particle eigensolver did not converge");
  SchrodingerEigensystem out{solver.eigenvalues(), solver.eigenvectors()};
  // Phase convention: largest-magnitude component (first on ties) real positive.
  for (Eigen::Index i = 0; i < out.eigenvectors.cols(); ++i) {
    auto col = out.eigenvectors.col(i);
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index k = 0; k < col.size(); ++k) {
      const double mag = std::abs(col(k));
      if (mag > best + 1e-12) {
        best = mag;
        arg = k;
      }
    }
    const cplx phase = std::conj(col(arg)) / std::abs(col(arg));
    col *= phase;
  }
  return out;
}

SchrodingerEigensystem diagonalize(const KineticBasis& basis, const RandomPotential& pot) {
  return diagonalize(one_particle_matrix(basis, pot));
}

double ids(const SchrodingerEigensystem& eigs, double volume, double energy) {
  const auto& ev = eigs.eigenvalues;
  const auto count = std::count_if(ev.data(), ev.data() + ev.size(),
                                   [energy](double e) { return e <= energy; });
  return static_cast<double>(count) / volume;
}

double ids(const KineticBasis& basis, double energy) {
  const auto count = std::ranges::count_if(basis.energies(), [energy](double e) { return e <= energy; });
  return static_cast<double>(count) / basis.volume();
}

double kinetic_ids_exact(int dimension, double side_length, double energy) {
  if (energy < 0.0) return 0.0;
  const double unit = 2.0 * kPi / side_length;
  const double r2 = 2.0 * energy / (unit * unit);
  const int r = static_cast<int>(std::floor(std::sqrt(r2))) + 1;
  long long count = 0;
  const int ry = dimension >= 2 ? r : 0, rz = dimension >= 3 ? r : 0;
  for (int a = -r; a <= r; ++a)
    for (int b = -ry; b <= ry; ++b)
      for (int c = -rz; c <= rz; ++c) {
        // Compare in energy units so boundary hits match KineticBasis rounding.
        const double e = 0.5 * unit * unit * (a * a + b * b + c * c);
        if (e <= energy) ++count;
      }
  return static_cast<double>(count) / std::pow(side_length, dimension);
}

double weyl_constant(int dimension) {
  switch (dimension) {
    case 1: return std::sqrt(2.0) / kPi;
    case 2: return 1.0 / (2.0 * kPi);
    case 3: return std::sqrt(2.0) / (3.0 * kPi * kPi);
    default: throw ConfigError("dimension must be 1, 2 or 3");
  }
}

DosTable dos_table(const SchrodingerEigensystem& eigs, double volume, int dimension,
                   const std::vector<double>& grid) {
  DosTable t;
  t.energies = grid;
  t.weyl_constant = weyl_constant(dimension);
  t.values.reserve(grid.size());
  for (double e : grid) t.values.push_back(ids(eigs, volume, e));
  return t;
}

TraceBandReport trace_band_bound_check(const KineticBasis& basis, const RandomPotential& pot,
                                       double delta, double mu) {
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  const Eigen::MatrixXcd v = potential_matrix(pot, basis);
  const double volume = basis.volume();
  TraceBandReport r;
  double trace = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (basis.energy(k) > delta) continue;
    trace += basis.energy(k) - mu + v(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real();
    ++r.band_size;
  }
  r.lhs = trace / volume;
  const double expected_v = (1.0 - pot.vacancy_probability) * pot.amplitude;
  const double nu0 = weyl_constant(basis.dimension()) * std::pow(delta, 0.5 * basis.dimension());
  r.rhs = nu0 * ((delta - mu) + expected_v);
  r.rhs_finite = (r.band_size / volume) * ((delta - mu) + pot.mean());
  r.slack = r.rhs - r.lhs;
  return r;
}

}  // namespace bogolab::oneparticle
