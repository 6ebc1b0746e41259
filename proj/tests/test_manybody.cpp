#include "doctest.h"

#include <algorithm>

#include "bogolab/fock.hpp"
#include "bogolab/manybody.hpp"
#include "bogolab/oneparticle.hpp"

using namespace bogolab;
using namespace bogolab::manybody;

namespace {

struct Setup {
  oneparticle::KineticBasis kinetic;
  oneparticle::SchrodingerEigensystem eigs;
  InteractionKernel kernel;
  ManyBodyHamiltonian h;
};

Setup make(int d, double l, int cutoff, std::uint64_t seed, double u0, double mu) {
  Setup s{oneparticle::KineticBasis(d, l, cutoff), {}, {u0, 0.8}, {}};
  const auto pot = oneparticle::sample_potential(d, l, l / 4.0, 1.0, 0.5, seed);
  s.eigs = oneparticle::diagonalize(s.kinetic, pot);
  s.h = assemble_full(s.kinetic, s.eigs, s.kernel, mu);
  return s;
}

Eigen::VectorXd sector_levels(const Eigen::MatrixXcd& h, const fock::OccupationBasis& b, int n) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b.total(i) == n) idx.push_back(static_cast<Eigen::Index>(i));
  Eigen::MatrixXcd sub(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) sub(i, j) = h(idx[i], idx[j]);
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(sub, Eigen::EigenvaluesOnly).eigenvalues();
}

// Two particles in first quantization on the symmetric subspace of the
// truncated one-particle space.
Eigen::VectorXd two_particle_levels(const Setup& s, double mu) {
  const auto& kin = s.kinetic;
  const int m = static_cast<int>(kin.size());
  const Eigen::MatrixXcd h1 = s.h.one_particle;
  const double v = kin.volume();
  auto pair = [&](int a, int b) { return a * m + b; };
  Eigen::MatrixXcd h2 = Eigen::MatrixXcd::Zero(m * m, m * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        h2(pair(a, b), pair(c, b)) += h1(a, c);
        h2(pair(b, a), pair(b, c)) += h1(a, c);
      }
  for (int i = 0; i < m * m; ++i) h2(i, i) -= 2.0 * mu;
  for (int k1 = 0; k1 < m; ++k1)
    for (int k2 = 0; k2 < m; ++k2)
      for (int k3 = 0; k3 < m; ++k3)
        for (int k4 = 0; k4 < m; ++k4) {
          const Eigen::Vector3d p = kin.momentum(k1) + kin.momentum(k2) - kin.momentum(k3) - kin.momentum(k4);
          if (p.norm() > 1e-9) continue;
          h2(pair(k1, k2), pair(k3, k4)) += s.kernel(kin.momentum(k1) - kin.momentum(k3)) / v;
        }
  std::vector<Eigen::VectorXcd> sym;
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(m * m);
      e[pair(a, b)] += 1.0;
      e[pair(b, a)] += 1.0;
      sym.push_back(e.normalized());
    }
  Eigen::MatrixXcd q(m * m, sym.size());
  for (std::size_t i = 0; i < sym.size(); ++i) q.col(i) = sym[i];
  const Eigen::MatrixXcd r = q.adjoint() * h2 * q;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(r, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_CASE("apply_term follows the ladder normalization") {
  Term t;
  t.coeff = 1.0;
  t.n_create = t.n_annihilate = 2;
  t.creators = {0, 0};
  t.annihilators = {1, 1};
  std::vector<int> n{1, 3};
  CHECK(apply_term(t, n) == doctest::Approx(std::sqrt(3.0 * 2.0 * 2.0 * 3.0)));
  CHECK(n == std::vector<int>{3, 1});
  std::vector<int> empty{0, 1};
  CHECK(apply_term(t, empty) == 0.0);
}

TEST_CASE("one-particle sector reproduces h - mu") {
  const auto s = make(1, 6.0, 3, 2, 0.7, -0.3);
  const auto b = fock::build_basis(static_cast<int>(s.kinetic.size()), 1);
  const Eigen::MatrixXcd h = Eigen::MatrixXcd(to_matrix(s.h.terms, *b));
  const auto lv = sector_levels(h, *b, 1);
  for (Eigen::Index i = 0; i < lv.size(); ++i) CHECK(lv[i] == doctest::Approx(s.eigs.eigenvalues[i] + 0.3));
}

TEST_CASE("two-particle sector matches first quantization") {
  for (auto [d, l, cutoff, seed] : {std::tuple{1, 6.0, 3, 1ULL}, {2, 5.0, 1, 4ULL}}) {
    const double mu = 0.25;
    const auto s = make(d, l, cutoff, seed, 0.9, mu);
    const auto b = fock::build_basis(static_cast<int>(s.kinetic.size()), 2);
    const Eigen::MatrixXcd h = Eigen::MatrixXcd(to_matrix(s.h.terms, *b));
    const auto second = sector_levels(h, *b, 2);
    const auto first = two_particle_levels(s, mu);
    REQUIRE(second.size() == first.size());
    CHECK((second - first).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("Hamiltonian is hermitian and conserves number") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto s = make(1, 2.0 * kPi, 2, seed, 0.5, -0.5);
    CHECK(s.h.terms.conserves_number());
    const auto b = fock::build_basis(static_cast<int>(s.kinetic.size()), 4);
    const auto op = to_operator(s.h, b);
    const Eigen::MatrixXcd h = Eigen::MatrixXcd(op.matrix);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(fock::max_abs(fock::commutator(op.matrix, fock::total_number(b).matrix)) < 1e-12);
  }
}

TEST_CASE("interaction conserves lattice momentum") {
  const oneparticle::KineticBasis kin(2, 4.0, 1);
  const auto b = fock::build_basis(static_cast<int>(kin.size()), 3);
  const auto u = assemble_interaction({0.6, 1.0}, b, kin);
  for (int axis = 0; axis < 2; ++axis) {
    const auto p = momentum_operator(b, kin, axis);
    CHECK(fock::max_abs(fock::commutator(u.matrix, p.matrix)) < 1e-12);
  }
  const Eigen::MatrixXcd um = Eigen::MatrixXcd(u.matrix);
  CHECK((um - um.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("interaction of a single pair in one mode") {
  // <2_0| U |2_0> = u(0) / (2V) * 2.
  const oneparticle::KineticBasis kin(1, 3.0, 1);
  const auto b = fock::build_basis(3, 2);
  const auto u = assemble_interaction({0.8, 1.0}, b, kin);
  std::vector<int> n(3, 0);
  n[0] = 2;
  const auto i = *b->index_of(n);
  CHECK(Eigen::MatrixXcd(u.matrix)(i, i).real() == doctest::Approx(0.8 / 3.0));
}

TEST_CASE("dropped interaction mass is reported") {
  const oneparticle::KineticBasis kin(1, 2.0 * kPi, 1);
  const auto t = interaction_terms({0.5, 1.0}, kin);
  CHECK(t.dropped > 0.0);
  CHECK(interaction_terms({0.0, 1.0}, kin).terms.terms().empty());
}

TEST_CASE("source term is hermitian and breaks number conservation") {
  auto s = make(1, 6.0, 2, 1, 0.0, -0.2);
  const auto h = add_source(s.h, 1, cplx(0.3, -0.1), 6.0);
  CHECK_FALSE(h.terms.conserves_number());
  const auto b = fock::build_basis(static_cast<int>(s.kinetic.size()), 3);
  const Eigen::MatrixXcd m = Eigen::MatrixXcd(to_matrix(h.terms, *b));
  CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(add_source(s.h, 99, 1.0, 6.0), ConfigError);
}

TEST_CASE("mismatched mode counts are rejected") {
  Polynomial p(3);
  p.add_one_body(0, 1, 1.0);
  CHECK_THROWS_AS(to_matrix(p, *fock::build_basis(2, 2)), ConfigError);
  Polynomial q(2);
  CHECK_THROWS_AS(p.append(q), ConfigError);
}
