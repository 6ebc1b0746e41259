#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bogolab/common.hpp"
#include "bogolab/oneparticle.hpp"

namespace bogolab::perfectgas {

using Label = oneparticle::Label;

/// Box with sides V^alpha_x, V^alpha_y, V^alpha_z, alpha_x >= alpha_y >= alpha_z,
/// sum alpha = 1. Modes k_j = 2 pi n_j / L_j, eps_k = k^2 / 2.
struct AnisotropicBox {
  std::array<double, 3> alpha{1.0 / 3, 1.0 / 3, 1.0 / 3};
  double volume = 1.0;

  static AnisotropicBox make(const std::array<double, 3>& alpha, double volume);
  double side(int axis) const;
  /// (2 pi / L_j)^2 / 2.
  double axis_unit(int axis) const;
  double energy(const Label& n) const;
};

/// Bose occupation sums over all modes of a box at fixed beta.
///
/// Modes with |n_j| <= N_j are summed explicitly; N_j covers kinetic energy
/// tau along each axis. The remaining modes enter through
///   sum_j exp(j beta mu) R_j,
/// where R_j is the theta-function mass outside the explicit box.
class BoseSum {
 public:
  BoseSum(const AnisotropicBox& box, double beta, double tau = 0.5);

  const AnisotropicBox& box() const { return box_; }
  double beta() const { return beta_; }

  /// (1/V) sum_k 1/(exp(beta(eps_k - mu)) - 1); needs mu < 0.
  double density(double mu) const;
  /// Same sum restricted to eps_k < window (window must lie inside the explicit set).
  double window_density(double mu, double window) const;
  /// (1/V) / (exp(beta(eps - mu)) - 1).
  double mode_density(double eps, double mu) const;

  /// Distinct explicit energies and their multiplicities.
  const std::vector<double>& energies() const { return energies_; }
  const std::vector<double>& multiplicities() const { return weights_; }
  /// Energy covered by the explicit set along every axis.
  double explicit_cutoff() const { return explicit_cutoff_; }

 private:
  AnisotropicBox box_;
  double beta_;
  double explicit_cutoff_ = 0.0;
  std::vector<double> energies_;
  std::vector<double> weights_;
  std::vector<double> remainder_;
};

/// rho_l(beta, mu, eta) with a source of strength |eta| in the mode of energy eps_source.
double density_function(const BoseSum& sum, double mu, double eta_abs, double eps_source);

/// Root of rho_l(beta, mu, eta) = rho_bar on (-inf, 0).
double solve_mu(const BoseSum& sum, double rho_bar, double eta_abs = 0.0, double eps_source = 0.0);

/// I(beta, mu) = int nu0(d eps) / (exp(beta(eps - mu)) - 1), d = 3, mu <= 0.
double bulk_density(double beta, double mu);
/// rho_c = I(beta, 0); infinite for d < 3.
double critical_density(double beta, int dimension = 3);
/// Root of I(beta, mu) = rho for rho < rho_c.
double bulk_mu(double beta, double rho);

struct PowerFit {
  double limit = 0.0;  // a
  double coeff = 0.0;  // b
  double exponent = 0.0;
  double residual = 0.0;
};

/// y = a + b x^-gamma by a gamma grid scan and linear least squares.
PowerFit fit_inverse_power(const std::vector<double>& x, const std::vector<double>& y);

struct SqrtFit {
  double limit = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// y = a + b sqrt(eta) + c eta.
SqrtFit fit_sqrt_series(const std::vector<double>& eta, const std::vector<double>& y);

enum class Condensation { none, type_i, type_ii, type_iii, inconclusive };
std::string to_string(Condensation c);

struct WindowRule {
  enum class Kind { power_law, lowest_multiple } kind = Kind::power_law;
  /// power_law: window = V^-exponent; lowest_multiple: multiple * lowest nonzero eps.
  double exponent = 0.4;
  double multiple = 10.0;
  double window(const AnisotropicBox& box) const;
};

struct VolumePoint {
  double volume = 0.0;
  double mu = 0.0;
  double ground_density = 0.0;
  double window_density = 0.0;
  double max_mode_density = 0.0;
  /// Densities of the tracked low-lying labels.
  std::vector<double> mode_densities;
};

struct CondensateReport {
  std::array<double, 3> alpha{};
  double beta = 1.0;
  double rho_bar = 0.0;
  double rho_c = 0.0;
  std::vector<Label> tracked;
  std::vector<VolumePoint> points;
  double ground_extrapolated = 0.0;
  double window_extrapolated = 0.0;
  int macroscopic_modes = 0;
  bool monotone = true;
  Condensation classification = Condensation::inconclusive;
};

CondensateReport classify_condensation(const std::array<double, 3>& alpha, double beta,
                                       double rho_bar, const std::vector<double>& volumes,
                                       const WindowRule& rule = {}, double threshold = 0.01);

enum class LimitOrder { volume_first, source_first };

enum class SourceScaling {
  /// Fixed integer label: eps drops with the box.
  fixed_label,
  /// Label rescaled with the box so that eps stays near a fixed value.
  fixed_energy,
};

struct QuasiAverageConfig {
  std::array<double, 3> alpha{0.6, 0.2, 0.2};
  double beta = 1.0;
  double rho_bar = 0.0;
  Label source{1, 0, 0};
  SourceScaling scaling = SourceScaling::fixed_label;
  /// Used with fixed_energy: target eps of the source mode.
  double source_energy = 0.5;
  std::vector<double> etas;
  std::vector<double> volumes;
  LimitOrder order = LimitOrder::volume_first;
};

struct QuasiAveragePoint {
  double eta = 0.0;
  double volume = 0.0;
  double mu = 0.0;
  double source_energy = 0.0;
  double source_density = 0.0;
  double ground_density = 0.0;
};

struct QuasiAverageReport {
  double rho_c = 0.0;
  std::vector<QuasiAveragePoint> points;
  /// Per eta, V-extrapolated source and ground densities.
  std::vector<double> source_by_eta;
  std::vector<double> ground_by_eta;
  /// eta -> 0 of the V-extrapolated values.
  double source_limit = 0.0;
  double ground_limit = 0.0;
  /// |eta|^2 / mu^2 at the largest volume, per eta.
  std::vector<double> source_term_by_eta;
};

/// Rejects LimitOrder::source_first.
QuasiAverageReport quasi_average_sweep(const QuasiAverageConfig& cfg);

}  // namespace bogolab::perfectgas
