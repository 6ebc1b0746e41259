#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "bogolab/common.hpp"
#include "bogolab/fock.hpp"
#include "bogolab/manybody.hpp"
#include "bogolab/oneparticle.hpp"

namespace bogolab::symbols {

/// Partition of the kinetic modes into the band I_delta = {k : eps_k <= delta}
/// and its complement.
struct ModeBand {
  double delta = 0.0;
  double volume = 1.0;
  std::vector<int> band;
  std::vector<int> complement;
  /// local[k] is the position of mode k inside `band` or `complement`.
  std::vector<int> local;
  std::vector<char> in_band;
  /// Finite-volume kinetic IDS at delta and 2 delta (no mode cutoff).
  double nu_delta = 0.0;
  double nu_2delta = 0.0;

  int size() const { return static_cast<int>(band.size()); }
  int mode_count() const { return static_cast<int>(in_band.size()); }
  bool contains(int k) const { return in_band[k] != 0; }
};

ModeBand build_band(const oneparticle::KineticBasis& kinetic, double delta);
/// Band made of an explicit set of modes; delta is the largest band energy.
ModeBand build_band(const oneparticle::KineticBasis& kinetic, const std::vector<int>& modes);

/// Amplitudes c_k for the band modes, in the order of ModeBand::band.
using CoherentPoint = Eigen::VectorXcd;

struct CoherentVector {
  Eigen::VectorXcd amplitudes;
  /// Per-mode mass lost to truncation, maximized over modes.
  double tail_mass = 0.0;
};

/// prod_k exp(-|c_k|^2/2 + c_k a+_k)|0> on a basis over the band modes,
/// renormalized after truncation.
CoherentVector coherent_vector(const fock::OccupationBasis& band_basis, const CoherentPoint& c);

/// Family index of a term in the lower-symbol expansion: one-body families
/// 1..5, interaction families 6..21, 0 for anything else (scalar, source).
int term_family(const manybody::Term& t, const ModeBand& band);

inline constexpr int kFamilyCount = 22;

/// Lower symbol, upper symbol and kappa = upper - lower of a Hamiltonian,
/// as operators on the complement Fock factor.
class SymbolEvaluator {
 public:
  SymbolEvaluator(const manybody::Polynomial& h, const ModeBand& band,
                  fock::BasisPtr complement_basis);

  const fock::BasisPtr& complement_basis() const { return basis_; }
  const ModeBand& band() const { return band_; }
  std::size_t dimension() const { return basis_->size(); }

  Eigen::MatrixXcd lower(const CoherentPoint& c) const;
  Eigen::MatrixXcd upper(const CoherentPoint& c) const;
  Eigen::MatrixXcd kappa(const CoherentPoint& c) const;
  /// Contribution of a single family to the lower symbol.
  Eigen::MatrixXcd lower_family(int family, const CoherentPoint& c) const;
  /// Coefficient of the identity in kappa.
  cplx kappa_scalar(const CoherentPoint& c) const;

  /// Number of stored band factors per family.
  std::array<int, kFamilyCount> family_counts() const;

  /// Flips the sign of kappa (negative control for the checking drivers).
  void set_kappa_sign(double s) { kappa_sign_ = s; }

 private:
  struct BandFactor {
    cplx coeff;
    int family = 0;
    std::array<int, 2> creators{-1, -1};
    std::array<int, 2> annihilators{-1, -1};
    int n_create = 0;
    int n_annihilate = 0;
  };
  struct Block {
    fock::SparseMatrix matrix;
    bool identity = false;
    std::vector<BandFactor> factors;
  };

  static cplx lower_value(const BandFactor& f, const CoherentPoint& c);
  static cplx upper_value(const BandFactor& f, const CoherentPoint& c);
  template <class F>
  Eigen::MatrixXcd combine(F&& weight) const;

  ModeBand band_;
  fock::BasisPtr basis_;
  std::vector<Block> blocks_;
  double kappa_sign_ = 1.0;
};

/// Complement-factor basis: complement modes only, total cap n_max.
fock::BasisPtr complement_basis(const ModeBand& band, int n_max);

/// Bound on -kappa from the kappa-estimate chain, as an operator diagonal in
/// the complement occupation basis:
///   Tr (h - mu) P + s gamma X
///   + (gamma/2)(4/V + 2 nu(d) + 2 nu(2d)) sum |c|^2 + 2 gamma nu(d) N_perp,
/// with X = nu(d) + V nu(d)^2 / 2 + V nu(d) nu(2d). The printed chain has s = -1.
struct KappaBoundTerms {
  double trace_band = 0.0;
  double gamma = 0.0;
  double sign = 1.0;
};

/// Largest eigenvalue of (-kappa - bound). Nonpositive when the bound holds.
double kappa_bound_excess(const SymbolEvaluator& ev, const CoherentPoint& c,
                          const KappaBoundTerms& terms);

/// Tr (h - mu) P_delta from the one-particle matrix (not divided by V).
double band_trace(const Eigen::MatrixXcd& one_particle, const ModeBand& band, double mu);

// Quadrature over the c-plane.

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);
/// n-point Gauss-Laguerre rule for weight exp(-x) on [0, inf).
QuadratureRule gauss_laguerre(int n);

struct PlaneNode {
  cplx c;
  double weight;
};

/// Nodes for the disk |c| <= radius with weights for the measure d^2c / pi.
std::vector<PlaneNode> disk_rule(int radial, int angular, double radius);

/// Nodes for int d^2c/pi exp(-|c|^2) g(c); weights exclude the Gaussian.
std::vector<PlaneNode> gaussian_plane_rule(int radial, int angular);

struct ProductNode {
  CoherentPoint c;
  double log_weight;
};

/// Tensor product of per-mode disk rules.
std::vector<ProductNode> product_rule(const std::vector<double>& radii, int radial, int angular);

struct QuadratureResult {
  cplx value{0.0, 0.0};
  /// Bound on the mass outside the integration disks.
  double tail_bound = 0.0;
};

/// int prod d^2c_k / pi f(c) over the disks of the given radii.
QuadratureResult cplane_quadrature(const std::function<cplx(const CoherentPoint&)>& f,
                                   const std::vector<double>& radii, int radial = 24,
                                   int angular = 32);

struct MonteCarloResult {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Uniform sampling of the product of disks, for bands with more than two modes.
MonteCarloResult monte_carlo_plane(const std::function<double(const CoherentPoint&)>& f,
                                   const std::vector<double>& radii, std::size_t samples,
                                   std::uint64_t seed);

}  // namespace bogolab::symbols
