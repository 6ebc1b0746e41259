#include "doctest.h"

#include <random>

#include "bogolab/fock.hpp"

using namespace bogolab;
using namespace bogolab::fock;

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Largest CCR defect restricted to columns whose total is below the cap.
double ccr_defect(const BasisPtr& b, int cap) {
  double worst = 0.0;
  for (int i = 0; i < b->mode_count(); ++i)
    for (int j = 0; j < b->mode_count(); ++j) {
      const auto ai = ladder(b, i, Ladder::annihilate).matrix;
      const auto aj = ladder(b, j, Ladder::annihilate).matrix;
      const auto cj = ladder(b, j, Ladder::create).matrix;
      const Eigen::MatrixXcd c = Eigen::MatrixXcd(commutator(ai, cj));
      for (std::size_t col = 0; col < b->size(); ++col) {
        if (b->total(col) >= cap) continue;
        for (std::size_t row = 0; row < b->size(); ++row) {
          const cplx want = (row == col && i == j) ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(c(row, col) - want));
        }
      }
      worst = std::max(worst, max_abs(commutator(ai, aj)));
    }
  return worst;
}

}  // namespace

TEST_CASE("basis size matches the stars-and-bars count") {
  for (int m = 1; m <= 4; ++m)
    for (int n = 0; n <= 6; ++n)
      CHECK(build_basis(m, n)->size() == static_cast<std::size_t>(binomial(m + n, m)));
}

TEST_CASE("split basis is a product of the two group bases") {
  const auto b = build_split_basis(4, {0, 2}, 5, 3);
  CHECK(b->size() == static_cast<std::size_t>(binomial(7, 2) * binomial(5, 2)));
  for (std::size_t i = 0; i < b->size(); ++i) {
    CHECK(b->occupation(i, 0) + b->occupation(i, 2) <= 5);
    CHECK(b->occupation(i, 1) + b->occupation(i, 3) <= 3);
  }
}

TEST_CASE("states are lexicographic and index_of inverts state") {
  const auto b = build_basis(3, 4);
  for (std::size_t i = 0; i < b->size(); ++i) {
    const auto s = b->state(i);
    CHECK(*b->index_of(s) == i);
    if (i > 0) {
      const auto p = b->state(i - 1);
      CHECK(std::lexicographical_compare(p.begin(), p.end(), s.begin(), s.end()));
    }
  }
  const int outside[3] = {5, 0, 0};
  CHECK_FALSE(b->index_of(outside).has_value());
}

TEST_CASE("invalid bases are rejected") {
  CHECK_THROWS_AS(build_basis(0, 2), ConfigError);
  CHECK_THROWS_AS(build_basis(2, -1), ConfigError);
  CHECK_THROWS_AS(build_basis(12, 12, 100), ConfigError);
  CHECK_THROWS_AS(OccupationBasis(3, std::vector<ModeGroup>{{{0, 1}, 2}}), ConfigError);
}

TEST_CASE("canonical commutation relations below the cap") {
  for (auto [m, n] : {std::pair{1, 8}, {2, 5}, {3, 4}}) {
    const auto b = build_basis(m, n);
    CHECK(ccr_defect(b, n) < 1e-12);
  }
}

TEST_CASE("ladder matrix elements") {
  const auto b = build_basis(2, 6);
  const auto a = ladder(b, 1, Ladder::annihilate).matrix;
  const auto c = ladder(b, 1, Ladder::create).matrix;
  const Eigen::MatrixXcd ad = Eigen::MatrixXcd(a).adjoint();
  CHECK((ad - Eigen::MatrixXcd(c)).cwiseAbs().maxCoeff() < 1e-15);
  const int from[2] = {1, 4}, to[2] = {1, 3};
  CHECK(std::abs(Eigen::MatrixXcd(a)(*b->index_of(to), *b->index_of(from)) - std::sqrt(4.0)) < 1e-15);
  // Creation at the cap maps to zero.
  const int full[2] = {2, 4};
  CHECK(Eigen::MatrixXcd(c).col(*b->index_of(full)).norm() == 0.0);
}

TEST_CASE("number operators are diagonal and hermitian") {
  const auto b = build_basis(3, 4);
  const auto n = total_number(b);
  CHECK(n.hermitian);
  const Eigen::MatrixXcd nm = Eigen::MatrixXcd(n.matrix);
  for (std::size_t i = 0; i < b->size(); ++i) CHECK(nm(i, i).real() == doctest::Approx(b->total(i)));
  CHECK((nm - Eigen::MatrixXcd(nm.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
  // a+a equals the number operator.
  for (int k = 0; k < 3; ++k) {
    const SparseMatrix prod = ladder(b, k, Ladder::create).matrix * ladder(b, k, Ladder::annihilate).matrix;
    CHECK(max_abs(SparseMatrix(prod - number(b, k).matrix)) < 1e-14);
  }
}

TEST_CASE("rotated ladders keep the commutation relations") {
  const auto b = build_basis(3, 4);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd z(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) z(i, j) = cplx(g(rng), g(rng));
  const Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(z).householderQ();
  const auto rot = mode_change(b, u);
  REQUIRE(rot.size() == 3);
  // Rotations preserve total number, so the relations hold below the cap.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Eigen::MatrixXcd c =
          Eigen::MatrixXcd(commutator(rot[i].matrix, adjoint(rot[j]).matrix));
      for (std::size_t col = 0; col < b->size(); ++col) {
        if (b->total(col) >= 4) continue;
        for (std::size_t row = 0; row < b->size(); ++row) {
          const cplx want = (row == col && i == j) ? 1.0 : 0.0;
          CHECK(std::abs(c(row, col) - want) < 1e-12);
        }
      }
    }
  Eigen::MatrixXcd bad = u;
  bad(0, 0) += 0.1;
  CHECK_THROWS_AS(mode_change(b, bad), ConfigError);
}

TEST_CASE("prune drops small entries") {
  SparseMatrix m(2, 2);
  m.insert(0, 0) = 1e-20;
  m.insert(1, 1) = 2.0;
  prune(m);
  CHECK(m.nonZeros() == 1);
  CHECK(max_abs(m) == 2.0);
}
