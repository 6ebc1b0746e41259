#include "doctest.h"

#include <sstream>

#include "bogolab/oneparticle.hpp"

using namespace bogolab;
using namespace bogolab::oneparticle;

namespace {

// Cell value at position x in a 1D box (-l/2, l/2).
double field_at(const RandomPotential& pot, double x) {
  const int j = static_cast<int>(std::floor((x + 0.5 * pot.side_length) / pot.cell_size()));
  return pot.cell_values[std::clamp(j, 0, pot.cells_per_axis - 1)];
}

// Periodic second-order finite differences for -(1/2) d^2/dx^2 + v.
Eigen::VectorXd finite_difference_levels(const RandomPotential& pot, int grid) {
  const double h = pot.side_length / grid;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(grid, grid);
  for (int i = 0; i < grid; ++i) {
    const double x = -0.5 * pot.side_length + (i + 0.5) * h;
    m(i, i) = 1.0 / (h * h) + field_at(pot, x);
    m(i, (i + 1) % grid) = m(i, (i + grid - 1) % grid) = -0.5 / (h * h);
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_CASE("kinetic basis labels and energies") {
  const KineticBasis b(2, 4.0, 2);
  CHECK(b.size() == 25);
  CHECK(b.label(0) == Label{0, 0, 0});
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(b.energy(i - 1) <= b.energy(i));
  const double unit = 2.0 * kPi / 4.0;
  const int i = b.find({1, -2, 0});
  REQUIRE(i >= 0);
  CHECK(b.energy(i) == doctest::Approx(0.5 * unit * unit * 5));
  CHECK(b.momentum(i)[1] == doctest::Approx(-2 * unit));
  CHECK(b.find({3, 0, 0}) == -1);
  CHECK(b.find({0, 0, 1}) == -1);
  CHECK_THROWS_AS(KineticBasis(4, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(KineticBasis(1, -1.0, 1), ConfigError);
}

TEST_CASE("potential sampling is reproducible and Bernoulli") {
  const auto a = sample_potential(2, 32.0, 1.0, 1.5, 0.3, 11);
  const auto b = sample_potential(2, 32.0, 1.0, 1.5, 0.3, 11);
  const auto c = sample_potential(2, 32.0, 1.0, 1.5, 0.3, 12);
  CHECK(a.cell_values == b.cell_values);
  CHECK(a.cell_values != c.cell_values);
  CHECK(a.cell_values.size() == 1024);
  int zeros = 0;
  for (double v : a.cell_values) {
    CHECK((v == 0.0 || v == 1.5));
    zeros += v == 0.0;
  }
  // 1024 cells: binomial standard deviation is about 15.
  CHECK(std::abs(zeros - 0.3 * 1024) < 75);
  CHECK_THROWS_AS(sample_potential(1, 8.0, 1.0, 1.0, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(sample_potential(1, 8.0, 1.0, -1.0, 0.5, 1), ConfigError);
}

TEST_CASE("potential file round trip") {
  const auto a = sample_potential(1, 16.0, 0.5, 2.0, 0.5, 5);
  std::stringstream ss;
  write_potential(ss, a);
  const auto b = read_potential(ss);
  CHECK(b.cell_values == a.cell_values);
  CHECK(b.cells_per_axis == a.cells_per_axis);
  CHECK(b.seed == a.seed);
  std::stringstream bad("1 16 0.5 2 0.5 5\n1\n");
  CHECK_THROWS_AS(read_potential(bad), ConfigError);
}

TEST_CASE("potential matrix against midpoint quadrature on a fine grid") {
  const auto pot = sample_potential(1, 16.0, 1.0, 1.0, 0.5, 3);
  const KineticBasis b(1, 16.0, 8);
  const Eigen::MatrixXcd v = potential_matrix(pot, b);
  CHECK((v - v.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  const int grid = 2048;
  const double h = 16.0 / grid;
  double worst = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double dk = b.momentum(i)[0] - b.momentum(j)[0];
      cplx acc = 0.0;
      for (int g = 0; g < grid; ++g) {
        const double x = -8.0 + (g + 0.5) * h;
        acc += field_at(pot, x) * std::polar(1.0, -dk * x);
      }
      acc *= h / 16.0;
      worst = std::max(worst, std::abs(acc - v(i, j)));
    }
  CHECK(worst < 2e-4);
}

TEST_CASE("plane-wave levels against finite differences") {
  const auto pot = sample_potential(1, 16.0, 1.0, 1.0, 0.5, 3);
  const auto pw = diagonalize(KineticBasis(1, 16.0, 96), pot).eigenvalues;
  const auto fd = finite_difference_levels(pot, 2048);
  for (int i = 0; i < 6; ++i) CHECK(pw[i] == doctest::Approx(fd[i]).epsilon(2e-3));
}

TEST_CASE("constant potential shifts the spectrum") {
  const KineticBasis b(2, 5.0, 2);
  const auto e = diagonalize(b, constant_potential(2, 5.0, 0.7)).eigenvalues;
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(e[i] == doctest::Approx(b.energy(i) + 0.7));
}

TEST_CASE("eigenvectors are orthonormal with the phase convention") {
  const auto pot = sample_potential(1, 12.0, 1.0, 1.0, 0.5, 9);
  const auto s = diagonalize(KineticBasis(1, 12.0, 10), pot);
  const auto& u = s.eigenvectors;
  CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff() < 1e-12);
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    const double top = u.col(c).cwiseAbs().maxCoeff();
    Eigen::Index arg = 0;
    while (std::abs(u(arg, c)) < top - 1e-12) ++arg;
    CHECK(std::abs(u(arg, c).imag()) < 1e-12);
    CHECK(u(arg, c).real() > 0.0);
  }
}

TEST_CASE("zero potential IDS equals the lattice count") {
  for (int d = 1; d <= 2; ++d) {
    const double l = d == 1 ? 32.0 : 9.0;
    const KineticBasis b(d, l, d == 1 ? 40 : 8);
    const auto s = diagonalize(b, constant_potential(d, l, 0.0));
    for (double e : {0.0, 0.3, 1.0, 2.0}) {
      // Brute-force count of integer vectors with (2 pi / l)^2 |n|^2 / 2 <= e.
      long long count = 0;
      const double unit = 2.0 * kPi / l;
      for (int a = -60; a <= 60; ++a)
        for (int c = (d == 2 ? -60 : 0); c <= (d == 2 ? 60 : 0); ++c)
          if (0.5 * unit * unit * (a * a + c * c) <= e) ++count;
      const double want = count / std::pow(l, d);
      CHECK(ids(s, b.volume(), e) == doctest::Approx(want));
      CHECK(kinetic_ids_exact(d, l, e) == doctest::Approx(want));
      CHECK(ids(b, e) == doctest::Approx(want));
    }
  }
}

TEST_CASE("Weyl constants from the ball volume") {
  const double ball[4] = {0.0, 2.0, kPi, 4.0 * kPi / 3.0};
  for (int d = 1; d <= 3; ++d)
    CHECK(weyl_constant(d) == doctest::Approx(ball[d] * std::pow(2.0, 0.5 * d) / std::pow(2.0 * kPi, d)));
  // Large-volume count approaches the Weyl law.
  CHECK(kinetic_ids_exact(3, 40.0, 1.0) == doctest::Approx(weyl_constant(3)).epsilon(0.03));
}

TEST_CASE("band trace report") {
  const KineticBasis b(1, 2.0 * kPi, 3);
  const auto r = trace_band_bound_check(b, constant_potential(1, 2.0 * kPi, 0.0), 0.6, -0.5);
  CHECK(r.band_size == 3);
  CHECK(r.lhs == doctest::Approx((0.5 + 1.0 + 1.0) / (2.0 * kPi)));
  CHECK_THROWS_AS(trace_band_bound_check(b, constant_potential(1, 2.0 * kPi, 0.0), 0.0, 0.0),
                  ConfigError);
}

TEST_CASE("dos table") {
  const KineticBasis b(1, 8.0, 6);
  const auto s = diagonalize(b, constant_potential(1, 8.0, 0.0));
  const auto t = dos_table(s, 8.0, 1, {0.0, 0.5, 1.0});
  CHECK(t.values.size() == 3);
  CHECK(t.weyl_constant == doctest::Approx(std::sqrt(2.0) / kPi));
  CHECK(t.values[2] >= t.values[1]);
}
