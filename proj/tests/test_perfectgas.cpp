#include "doctest.h"

#include "bogolab/perfectgas.hpp"

using namespace bogolab;
using namespace bogolab::perfectgas;

namespace {

// zeta(3/2): partial sum plus Euler-Maclaurin tail.
double zeta_three_halves() {
  const int n = 100000;
  double s = 0.0;
  for (int k = n - 1; k >= 1; --k) s += std::pow(k, -1.5);
  const double x = n;
  s += 2.0 / std::sqrt(x) + 0.5 * std::pow(x, -1.5) + 1.5 / 12.0 * std::pow(x, -2.5);
  return s;
}

// Li_{3/2}(z) by its power series.
double polylog_three_halves(double z) {
  double s = 0.0;
  for (int j = 1; j < 2000; ++j) {
    const double t = std::pow(z, j) / std::pow(j, 1.5);
    s += t;
    if (t < 1e-18) break;
  }
  return s;
}

// Direct sum over all labels with |n_a| <= n.
double brute_density(const AnisotropicBox& box, double beta, double mu, int n) {
  double s = 0.0;
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b)
      for (int c = -n; c <= n; ++c) s += 1.0 / std::expm1(beta * (box.energy({a, b, c}) - mu));
  return s / box.volume;
}

}  // namespace

TEST_CASE("box construction") {
  const auto b = AnisotropicBox::make({0.6, 0.2, 0.2}, 1e5);
  CHECK(b.side(0) == doctest::Approx(std::pow(1e5, 0.6)));
  CHECK(b.side(0) * b.side(1) * b.side(2) == doctest::Approx(1e5));
  CHECK(b.energy({1, 0, 0}) == doctest::Approx(0.5 * std::pow(2.0 * kPi / b.side(0), 2)));
  CHECK_THROWS_AS(AnisotropicBox::make({0.5, 0.3, 0.3}, 10.0), ConfigError);
  CHECK_THROWS_AS(AnisotropicBox::make({0.2, 0.4, 0.4}, 10.0), ConfigError);
  CHECK_THROWS_AS(AnisotropicBox::make({0.5, 0.5, 0.0}, 10.0), ConfigError);
  CHECK_THROWS_AS(AnisotropicBox::make({1.0 / 3, 1.0 / 3, 1.0 / 3}, -1.0), ConfigError);
}

TEST_CASE("critical density from zeta(3/2)") {
  for (double beta : {0.5, 1.0, 2.0})
    CHECK(critical_density(beta) == doctest::Approx(zeta_three_halves() / std::pow(2.0 * kPi * beta, 1.5)).epsilon(1e-10));
  CHECK(std::isinf(critical_density(1.0, 2)));
  CHECK(std::isinf(critical_density(1.0, 1)));
}

TEST_CASE("bulk density from the polylog series") {
  for (double mu : {-0.01, -0.3, -1.0, -3.0})
    CHECK(bulk_density(1.0, mu) == doctest::Approx(polylog_three_halves(std::exp(mu)) / std::pow(2.0 * kPi, 1.5)).epsilon(1e-10));
  CHECK(bulk_density(1.0, -1.0) == doctest::Approx(0.02720326).epsilon(1e-6));
  const double rho = 0.5 * critical_density(1.0);
  CHECK(bulk_density(1.0, bulk_mu(1.0, rho)) == doctest::Approx(rho).epsilon(1e-10));
  CHECK_THROWS_AS(bulk_mu(1.0, 2.0 * critical_density(1.0)), ConfigError);
}

TEST_CASE("finite-box sums against direct summation") {
  for (auto alpha : {std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.6, 0.2, 0.2}, {0.5, 0.3, 0.2}}) {
    const auto box = AnisotropicBox::make(alpha, 40.0);
    const BoseSum sum(box, 1.0);
    for (double mu : {-0.05, -0.5, -2.0})
      CHECK(sum.density(mu) == doctest::Approx(brute_density(box, 1.0, mu, 40)).epsilon(1e-12));
  }
  const BoseSum sum(AnisotropicBox::make({1.0 / 3, 1.0 / 3, 1.0 / 3}, 40.0), 1.0);
  CHECK_THROWS_AS(sum.density(0.0), ConfigError);
  double total = 0.0;
  for (double w : sum.multiplicities()) total += w;
  CHECK(total == doctest::Approx(std::pow(2.0 * std::ceil(std::sqrt(0.5 / sum.box().axis_unit(0))) + 1.0, 3)));
}

TEST_CASE("window density counts the low modes") {
  const auto box = AnisotropicBox::make({0.6, 0.2, 0.2}, 1e4);
  const BoseSum sum(box, 1.0);
  const double w = 3.5 * box.axis_unit(0);
  const double mu = -0.01;
  double want = 0.0;
  for (int a = -3; a <= 3; ++a)
    if (box.energy({a, 0, 0}) < w) want += sum.mode_density(box.energy({a, 0, 0}), mu);
  CHECK(sum.window_density(mu, w) == doctest::Approx(want));
  CHECK_THROWS_AS(sum.window_density(mu, 10.0 * sum.explicit_cutoff()), ConfigError);
}

TEST_CASE("condensate equation root") {
  const BoseSum sum(AnisotropicBox::make({1.0 / 3, 1.0 / 3, 1.0 / 3}, 1e4), 1.0);
  for (double ratio : {0.5, 2.0}) {
    const double rho = ratio * critical_density(1.0);
    const double mu = solve_mu(sum, rho);
    CHECK(mu < 0.0);
    CHECK(sum.density(mu) == doctest::Approx(rho).epsilon(1e-10));
    const double mu_s = solve_mu(sum, rho, 0.05, 0.01);
    CHECK(density_function(sum, mu_s, 0.05, 0.01) == doctest::Approx(rho).epsilon(1e-10));
  }
  CHECK_THROWS_AS(solve_mu(sum, -1.0), ConfigError);
}

TEST_CASE("fits recover synthetic data") {
  std::vector<double> v{1e4, 1e5, 1e6, 1e7}, y;
  for (double x : v) y.push_back(0.3 + 2.0 * std::pow(x, -0.5));
  const auto p = fit_inverse_power(v, y);
  CHECK(p.limit == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(p.exponent == doctest::Approx(0.5).epsilon(0.01));
  std::vector<double> eta{0.04, 0.02, 0.01, 0.005}, z;
  for (double e : eta) z.push_back(1.2 - 0.7 * std::sqrt(e) + 3.0 * e);
  const auto s = fit_sqrt_series(eta, z);
  CHECK(s.limit == doctest::Approx(1.2).epsilon(1e-10));
  CHECK(s.b == doctest::Approx(-0.7).epsilon(1e-8));
  CHECK_THROWS_AS(fit_inverse_power({1.0, 2.0}, {1.0, 2.0}), ConfigError);
}

TEST_CASE("classification") {
  const double rc = critical_density(1.0);
  const auto below = classify_condensation({0.6, 0.2, 0.2}, 1.0, 0.5 * rc, {1e4, 1e5, 1e6});
  CHECK(below.classification == Condensation::none);
  const auto cube = classify_condensation({1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0, 2.0 * rc, {1e4, 1e5, 1e6, 1e7});
  CHECK(cube.classification == Condensation::type_i);
  CHECK(cube.ground_extrapolated == doctest::Approx(rc).epsilon(0.02));
  const auto cigar = classify_condensation({0.6, 0.2, 0.2}, 1.0, 2.0 * rc, {1e5, 1e6, 1e7, 1e8});
  CHECK(cigar.classification == Condensation::type_iii);
  CHECK(cigar.window_extrapolated == doctest::Approx(rc).epsilon(0.02));
  CHECK(to_string(Condensation::type_iii) == "III");
  CHECK_THROWS_AS(classify_condensation({0.6, 0.2, 0.2}, 1.0, rc, {1e4, 1e5}), ConfigError);
}

TEST_CASE("quasi-average sweep") {
  const double rc = critical_density(1.0);
  QuasiAverageConfig q;
  q.rho_bar = 2.0 * rc;
  q.etas = {0.04, 0.02, 0.01, 0.005};
  q.volumes = {1e5, 1e6, 1e7, 1e8};
  const auto r = quasi_average_sweep(q);
  CHECK(r.points.size() == 16);
  CHECK(r.source_limit == doctest::Approx(rc).epsilon(0.03));
  CHECK(std::abs(r.ground_limit) < 0.02 * rc);
  for (std::size_t i = 1; i < r.source_by_eta.size(); ++i) CHECK(r.source_by_eta[i] < r.source_by_eta[i - 1]);

  q.scaling = SourceScaling::fixed_energy;
  const auto e = quasi_average_sweep(q);
  for (std::size_t i = 1; i < e.source_by_eta.size(); ++i) CHECK(e.source_by_eta[i] < e.source_by_eta[i - 1]);
  CHECK(e.source_by_eta.back() < 0.01 * rc);

  q.order = LimitOrder::source_first;
  CHECK_THROWS_AS(quasi_average_sweep(q), ConfigError);
}
