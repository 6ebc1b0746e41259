#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bogolab/common.hpp"

namespace bogolab::oneparticle {

using Label = std::array<int, 3>;

/// Plane-wave modes psi_k = V^{-1/2} exp(i k.x) of the periodic box (-l/2, l/2)^d
/// with k_j = 2 pi n_j / l and |n_j| <= cutoff, sorted by energy k^2/2 and then
/// lexicographically by label.
class KineticBasis {
 public:
  KineticBasis() = default;
  KineticBasis(int dimension, double side_length, int cutoff);

  int dimension() const { return dim_; }
  double side_length() const { return side_; }
  int cutoff() const { return cutoff_; }
  double volume() const;
  std::size_t size() const { return labels_.size(); }

  const Label& label(std::size_t i) const { return labels_[i]; }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<double>& energies() const { return energies_; }
  double energy(std::size_t i) const { return energies_[i]; }
  /// Squared integer norm |n|^2 of mode i.
  int norm2(std::size_t i) const;
  Eigen::Vector3d momentum(std::size_t i) const;

  /// Index of the mode with the given label, or -1 when outside the cutoff.
  int find(const Label& label) const;

 private:
  int dim_ = 1;
  double side_ = 1.0;
  int cutoff_ = 0;
  std::vector<Label> labels_;
  std::vector<double> energies_;
};

KineticBasis build_kinetic(int dimension, double side_length, int cutoff);

/// Piecewise-constant Bernoulli block field: each grid cell carries 0 with
/// probability p and b otherwise.
struct RandomPotential {
  int dimension = 1;
  double side_length = 1.0;
  int cells_per_axis = 1;
  double amplitude = 0.0;
  double vacancy_probability = 0.0;
  std::uint64_t seed = 0;
  /// Row-major over the cell grid, first axis slowest.
  std::vector<double> cell_values;

  double cell_size() const { return side_length / cells_per_axis; }
  double mean() const;
  bool identically_zero() const;
};

/// Cell count per axis is round(l / cell_size), at least 1.
RandomPotential sample_potential(int dimension, double side_length, double cell_size,
                                 double amplitude, double vacancy_probability,
                                 std::uint64_t seed);

RandomPotential constant_potential(int dimension, double side_length, double value);

/// Header line "d l cell_size b p seed" followed by one cell value per line.
void write_potential(std::ostream& os, const RandomPotential& pot);
RandomPotential read_potential(std::istream& is);

/// Matrix of <psi_k| v |psi_k'> from closed-form cell integrals.
Eigen::MatrixXcd potential_matrix(const RandomPotential& pot, const KineticBasis& basis);

/// h = diag(eps_k) + v in the plane-wave basis.
Eigen::MatrixXcd one_particle_matrix(const KineticBasis& basis, const RandomPotential& pot);

struct SchrodingerEigensystem {
  Eigen::VectorXd eigenvalues;
  /// Column i holds <psi_k|phi_i>.
  Eigen::MatrixXcd eigenvectors;
};

SchrodingerEigensystem diagonalize(const KineticBasis& basis, const RandomPotential& pot);
SchrodingerEigensystem diagonalize(const Eigen::MatrixXcd& hermitian);

/// (1/V) #{levels <= E}.
double ids(const SchrodingerEigensystem& eigs, double volume, double energy);
double ids(const KineticBasis& basis, double energy);

/// Counts lattice modes with k^2/2 <= E without a cutoff.
double kinetic_ids_exact(int dimension, double side_length, double energy);

/// C_d in nu(E) = C_d E^{d/2}.
double weyl_constant(int dimension);

struct DosTable {
  std::vector<double> energies;
  std::vector<double> values;
  double weyl_constant = 0.0;
};

DosTable dos_table(const SchrodingerEigensystem& eigs, double volume, int dimension,
                   const std::vector<double>& grid);

struct TraceBandReport {
  double lhs = 0.0;        // (1/V) Tr (h - mu) P_delta
  double rhs = 0.0;        // nu0(delta) ((delta - mu) + mean v), Weyl limit
  double rhs_finite = 0.0; // same with nu_l(delta) and the sample mean
  double slack = 0.0;      // rhs - lhs
  int band_size = 0;
};

TraceBandReport trace_band_bound_check(const KineticBasis& basis, const RandomPotential& pot,
                                       double delta, double mu);

}  // namespace bogolab::oneparticle
