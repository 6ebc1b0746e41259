#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bogolab/common.hpp"
#include "bogolab/fock.hpp"
#include "bogolab/manybody.hpp"
#include "bogolab/oneparticle.hpp"
#include "bogolab/symbols.hpp"

namespace bogolab::pressure {

struct ThermoParams {
  double beta = 1.0;
  double mu = 0.0;
};

/// ln sum_i exp(-beta e_i), shifted by the smallest eigenvalue.
double log_trace_exp(const Eigen::VectorXd& eigenvalues, double beta);
/// ln Tr exp(-beta h) for a hermitian matrix.
double log_trace_exp(const Eigen::MatrixXcd& h, double beta);

/// (1/beta V) ln Tr exp(-beta H) on the truncated space of `op`.
double exact_pressure(const fock::BosonOperator& op, double beta, double volume);

/// Grand partition function of a number-conserving Hamiltonian on the space
/// (band modes, untruncated) x (complement modes, total <= n_max), summed
/// sector by sector in the total particle number.
class SectorSum {
 public:
  SectorSum(const manybody::Polynomial& h, const symbols::ModeBand& band, int n_max,
            double beta);

  /// ln Xi at chemical-potential shift dmu (H -> H - dmu N).
  double log_xi(double dmu = 0.0) const;
  /// <N> at shift dmu from Gibbs weights.
  double mean_number(double dmu = 0.0) const;
  /// Highest sector included.
  int band_cap() const { return static_cast<int>(log_z_.size()) - 1; }
  /// ln Z_N of each sector.
  const std::vector<double>& sector_log_z() const { return log_z_; }

 private:
  std::vector<double> log_z_;
  double beta_;
};

struct ExactResult {
  double log_xi = 0.0;
  double pressure = 0.0;
  /// Gibbs density <N>/V.
  double density = 0.0;
  /// Centered-difference density d p / d mu (Richardson-extrapolated).
  double density_fd = 0.0;
  int band_cap = 0;
  /// |p(n_max) - p(n_max + 1)|, when requested.
  double truncation_delta = -1.0;
};

ExactResult exact_sector_pressure(const manybody::Polynomial& h, const symbols::ModeBand& band,
                                  int n_max, const ThermoParams& tp, bool certify = false);

/// Smallest n_max in [start, limit] with |p(n) - p(n+1)| < tol; nullopt when none.
std::optional<int> certify_nmax(const manybody::Polynomial& h, const symbols::ModeBand& band,
                                const ThermoParams& tp, int start, int limit, double tol = 1e-6);

/// (1/beta V) ln Tr exp(-beta h_low(c)) on the complement factor.
double approximating_pressure(const symbols::SymbolEvaluator& ev, const symbols::CoherentPoint& c,
                              const ThermoParams& tp, double dmu = 0.0);

struct OptimizerOptions {
  int restarts = 16;
  double tolerance = 1e-9;
  int max_iterations = 4000;
  double seed_radius = 4.0;
};

struct Maximizer {
  symbols::CoherentPoint point;
  double pressure = 0.0;
  /// Restarts ending within 1e-8 of the best value.
  int near_optimal = 0;
  int converged_restarts = 0;
};

/// Multi-start Nelder-Mead over (Re c_k, Im c_k). The returned point is the
/// gauge representative with the first band amplitude real and nonnegative.
Maximizer maximize_over_c(const symbols::SymbolEvaluator& ev, const ThermoParams& tp,
                          const OptimizerOptions& opt = {});

/// Brute-force scan over |c| on a grid for a single-mode band (test oracle).
double scan_max_pressure(const symbols::SymbolEvaluator& ev, const ThermoParams& tp,
                         double radius, int points);

struct IntegratedResult {
  double log_xi_low = 0.0;
  double log_xi_up = 0.0;
  /// Relative error estimates of the two integrals (tail + rule refinement).
  double error_low = 0.0;
  double error_up = 0.0;
  /// beta <-kappa>_up.
  double beta_minus_kappa_up = 0.0;
  std::vector<double> radii;
};

struct QuadratureOptions {
  int radial = 24;
  int angular = 32;
  int coarse_radial = 16;
  int coarse_angular = 24;
};

/// c-integrated partition functions of the lower and upper symbols.
IntegratedResult integrated_pressures(const symbols::SymbolEvaluator& ev, const ThermoParams& tp,
                                      const symbols::CoherentPoint& center,
                                      const QuadratureOptions& q = {}, double dmu = 0.0,
                                      const std::vector<double>& radii = {});

/// Integration radius per band mode: max(4, 2|c*_k| + 4), extended until the
/// integrand along the radial slice has fallen by e^-30 from its peak.
std::vector<double> integration_radii(const symbols::SymbolEvaluator& ev, const ThermoParams& tp,
                                      const symbols::CoherentPoint& center);

struct ErrorBudget {
  double trace_band = 0.0;     // Tr (h - mu) P_delta
  double d_mu_log_low = 0.0;   // d/dmu ln of the integrated lower-symbol partition function
  double k_literal = 0.0;
  double k_rigorous = 0.0;
  double m_value = 0.0;
  double bound_slack = 0.0;    // integrated-vs-max bound: rhs - lhs, best alpha
};

struct CellSpec {
  int dimension = 1;
  double side_length = 2.0 * kPi;
  int cutoff = 1;
  double delta = 0.3;
  double cell_size = 2.0 * kPi / 8.0;
  double amplitude = 1.0;
  double vacancy = 0.5;
  std::uint64_t seed = 1;
  double u0 = 0.5;
  double sigma = 1.0;
  ThermoParams thermo;
  int n_max = 4;
};

struct CellReport {
  CellSpec spec;
  int band_size = 0;
  ExactResult exact;
  Maximizer max;
  IntegratedResult integrated;
  ErrorBudget budget;
  double p_low_int = 0.0;
  double p_up_int = 0.0;

  bool sandwich_ok = false;     // Xi_low_int <= Xi_exact <= Xi_up_int beyond error
  bool max_bound_ok = false;    // p_low_max <= p_exact + 1e-9
  bool residual_ok = false;     // p_exact - p_low_max <= K + 1e-6
  bool bogoliubov_ok = false;   // ln Xi_up - ln Xi_low <= beta <-kappa>_up + 2 err
  double wall_seconds = 0.0;
};

struct CellOptions {
  OptimizerOptions optimizer;
  QuadratureOptions quadrature;
  /// Negative control: multiplies kappa by -1.
  bool flip_kappa = false;
};

CellReport run_cell(const CellSpec& spec, const CellOptions& opt = {});

/// K from the band trace, the interaction bound and d/dmu ln Xi_low_int.
double literal_k(const symbols::ModeBand& band, double trace_band, double gamma, double beta,
                 double d_mu_log_low);

/// The literal error term and its companions for one cell.
ErrorBudget error_budget(const symbols::SymbolEvaluator& ev, const Eigen::MatrixXcd& one_particle,
                         const ThermoParams& tp, double gamma, const Maximizer& max,
                         const IntegratedResult& integrated, const QuadratureOptions& q);

inline constexpr int kCsvSchemaVersion = 1;

void write_csv_header(std::ostream& os);
/// One row per cell; wall_time is left empty unless `with_time`.
void write_csv_row(std::ostream& os, const CellReport& r, bool with_time = false);

}  // namespace bogolab::pressure
