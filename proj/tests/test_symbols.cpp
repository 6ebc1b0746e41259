#include "doctest.h"

#include <random>

#include "bogolab/fock.hpp"
#include "bogolab/manybody.hpp"
#include "bogolab/oneparticle.hpp"
#include "bogolab/symbols.hpp"

using namespace bogolab;
using namespace bogolab::symbols;

namespace {

struct System {
  oneparticle::KineticBasis kinetic{1, 2.0 * kPi, 1};
  manybody::ManyBodyHamiltonian h;
};

System three_modes(std::uint64_t seed, double mu) {
  System s;
  const auto pot = oneparticle::sample_potential(1, 2.0 * kPi, 2.0 * kPi / 8.0, 1.0, 0.5, seed);
  s.h = manybody::assemble_full(s.kinetic, oneparticle::diagonalize(s.kinetic, pot), {0.5, 1.0}, mu);
  return s;
}

std::vector<CoherentPoint> random_points(int count, int modes, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<CoherentPoint> out;
  for (int p = 0; p < count; ++p) {
    CoherentPoint c(modes);
    for (int k = 0; k < modes; ++k) c[k] = std::polar(radius * std::sqrt(u(rng)), 2.0 * kPi * u(rng));
    out.push_back(c);
  }
  return out;
}

// <c| H |c> over the band factor, computed from the full Fock matrix on a
// basis with a generous cap on the band modes.
Eigen::MatrixXcd partial_inner_product(const manybody::Polynomial& h, const ModeBand& band,
                                       int n_max, const CoherentPoint& c, int band_cap) {
  const int m = band.mode_count();
  const auto full = fock::build_split_basis(m, band.band, band_cap, n_max);
  const auto comp = fock::build_basis(std::max<int>(1, static_cast<int>(band.complement.size())),
                                      band.complement.empty() ? 0 : n_max);
  const fock::SparseMatrix hm = manybody::to_matrix(h, *full);

  // Unnormalized product amplitudes e^{-|c|^2/2} c^n / sqrt(n!) per band mode.
  std::vector<cplx> amp(full->size());
  std::vector<Eigen::Index> cidx(full->size());
  for (std::size_t s = 0; s < full->size(); ++s) {
    cplx a = 1.0;
    for (int j = 0; j < band.size(); ++j) {
      const int n = full->occupation(s, band.band[j]);
      cplx v = std::exp(-0.5 * std::norm(c[j]));
      for (int i = 1; i <= n; ++i) v *= c[j] / std::sqrt(static_cast<double>(i));
      a *= v;
    }
    amp[s] = a;
    std::vector<int> n;
    for (int k : band.complement) n.push_back(full->occupation(s, k));
    if (n.empty()) n.push_back(0);
    cidx[s] = static_cast<Eigen::Index>(*comp->index_of(n));
  }

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(comp->size(), comp->size());
  for (int j = 0; j < hm.outerSize(); ++j)
    for (fock::SparseMatrix::InnerIterator it(hm, j); it; ++it)
      out(cidx[it.row()], cidx[j]) += std::conj(amp[it.row()]) * it.value() * amp[j];
  return out;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("energy band and explicit band") {
  const oneparticle::KineticBasis kin(1, 2.0 * kPi, 1);
  const auto b = build_band(kin, 0.3);
  CHECK(b.band == std::vector<int>{0});
  CHECK(b.complement == std::vector<int>{1, 2});
  CHECK(b.nu_delta == doctest::Approx(1.0 / (2.0 * kPi)));
  CHECK(b.nu_2delta == doctest::Approx(3.0 / (2.0 * kPi)));
  const auto e = build_band(kin, std::vector<int>{0, 2});
  CHECK(e.size() == 2);
  CHECK(e.contains(2));
  CHECK_FALSE(e.contains(1));
  CHECK(e.local[2] == 1);
  CHECK(e.local[1] == 0);
  CHECK_THROWS_AS(build_band(kin, 0.0), ConfigError);
  CHECK_THROWS_AS(build_band(kin, std::vector<int>{0, 0}), ConfigError);
  CHECK_THROWS_AS(build_band(kin, std::vector<int>{5}), ConfigError);
}

TEST_CASE("lower symbol against the partial inner product") {
  const auto s = three_modes(1, -0.5);
  const auto& kin = s.kinetic;
  for (int nb : {1, 2}) {
    const auto band = nb == 1 ? build_band(kin, 0.3) : build_band(kin, std::vector<int>{0, kin.find({1, 0, 0})});
    REQUIRE(band.size() == nb);
    const SymbolEvaluator ev(s.h.terms, band, complement_basis(band, 4));
    double worst = 0.0;
    for (const auto& c : random_points(20, nb, 2.0, 17 + nb))
      worst = std::max(worst, (ev.lower(c) - partial_inner_product(s.h.terms, band, 4, c, 40))
                                  .cwiseAbs()
                                  .maxCoeff());
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("upper symbol resolution identity for a+a on one mode") {
  // int d^2c/pi (|c|^2 - 1) |c><c| = a+a, with |c><c| = e^{-|c|^2} c^n conj(c)^m / sqrt(n! m!).
  const int cap = 10;
  const auto rule = gaussian_plane_rule(40, 64);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(cap + 1, cap + 1);
  for (const auto& node : rule) {
    Eigen::VectorXcd v(cap + 1);
    for (int n = 0; n <= cap; ++n) v[n] = std::pow(node.c, n) / std::sqrt(factorial(n));
    acc += node.weight * (std::norm(node.c) - 1.0) * v * v.adjoint();
  }
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(cap + 1, cap + 1);
  for (int n = 0; n <= cap; ++n) want(n, n) = n;
  CHECK((acc - want).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("evaluator upper symbols reproduce the operators") {
  // Band = all three modes, so the complement factor is one-dimensional. The
  // operators act on modes 0 and 2 only; the mode-1 integral is the identity.
  const oneparticle::KineticBasis kin(1, 2.0 * kPi, 1);
  const auto band = build_band(kin, std::vector<int>{0, 1, 2});
  const int cap = 6;
  const auto basis = fock::build_basis(2, cap);
  std::vector<manybody::Polynomial> ops(5, manybody::Polynomial(3)), reduced(5, manybody::Polynomial(2));
  ops[0].add_one_body(0, 0, 1.0);
  reduced[0].add_one_body(0, 0, 1.0);
  ops[1].add_two_body(0, 0, 0, 0, 1.0);
  reduced[1].add_two_body(0, 0, 0, 0, 1.0);
  ops[2].add_one_body(0, 2, cplx(0.3, 0.4));
  reduced[2].add_one_body(0, 1, cplx(0.3, 0.4));
  ops[3].add_two_body(0, 2, 2, 0, 1.0);
  reduced[3].add_two_body(0, 1, 1, 0, 1.0);
  ops[4].add_two_body(2, 2, 0, 2, 0.5);
  reduced[4].add_two_body(1, 1, 0, 1, 0.5);
  const auto rule = gaussian_plane_rule(8, 16);
  for (std::size_t o = 0; o < ops.size(); ++o) {
    const SymbolEvaluator ev(ops[o], band, complement_basis(band, 0));
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(basis->size(), basis->size());
    for (const auto& a : rule)
      for (const auto& b : rule) {
        CoherentPoint c(3);
        c << a.c, cplx(0.0), b.c;
        Eigen::VectorXcd v(basis->size());
        for (std::size_t i = 0; i < basis->size(); ++i) {
          const int n0 = basis->occupation(i, 0), n2 = basis->occupation(i, 1);
          v[static_cast<Eigen::Index>(i)] = std::pow(c[0], n0) / std::sqrt(factorial(n0)) *
                                            std::pow(c[2], n2) / std::sqrt(factorial(n2));
        }
        acc += a.weight * b.weight * ev.upper(c)(0, 0) * v * v.adjoint();
      }
    const Eigen::MatrixXcd want = Eigen::MatrixXcd(manybody::to_matrix(reduced[o], *basis));
    double worst = 0.0;
    for (std::size_t i = 0; i < basis->size(); ++i)
      for (std::size_t j = 0; j < basis->size(); ++j)
        if (basis->total(i) <= cap - 2 && basis->total(j) <= cap - 2)
          worst = std::max(worst, std::abs(acc(i, j) - want(i, j)));
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("kappa of simple band terms") {
  const oneparticle::KineticBasis kin(1, 2.0 * kPi, 1);
  const auto band = build_band(kin, 0.3);
  manybody::Polynomial p(3);
  p.add_one_body(0, 0, 0.7);
  p.add_two_body(0, 0, 0, 0, 0.2);
  const SymbolEvaluator ev(p, band, complement_basis(band, 3));
  CoherentPoint c(1);
  c << cplx(0.4, -1.1);
  const double x = std::norm(c[0]);
  // (a+a)^up - low = -1, (a+a+aa)^up - low = -4|c|^2 + 2.
  CHECK(std::abs(ev.kappa_scalar(c) - cplx(-0.7 + 0.2 * (-4.0 * x + 2.0))) < 1e-13);
  const Eigen::MatrixXcd k = ev.kappa(c);
  CHECK((k - k(0, 0) * Eigen::MatrixXcd::Identity(k.rows(), k.cols())).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(ev.lower(c)(0, 0) - cplx(0.7 * x + 0.2 * x * x)) < 1e-13);
}

TEST_CASE("symbols are hermitian and families add up") {
  const auto s = three_modes(2, 0.2);
  for (int nb : {1, 2}) {
    const auto band = nb == 1 ? build_band(s.kinetic, 0.3)
                              : build_band(s.kinetic, std::vector<int>{0, s.kinetic.find({-1, 0, 0})});
    const SymbolEvaluator ev(s.h.terms, band, complement_basis(band, 4));
    for (const auto& c : random_points(10, nb, 3.0, 5)) {
      const Eigen::MatrixXcd lo = ev.lower(c), up = ev.upper(c);
      CHECK((lo - lo.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((up - up.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
      Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(lo.rows(), lo.cols());
      for (int f = 0; f < kFamilyCount; ++f) sum += ev.lower_family(f, c);
      CHECK((sum - lo).cwiseAbs().maxCoeff() < 1e-12);
    }
    int total = 0;
    for (int n : ev.family_counts()) total += n;
    CHECK(total == static_cast<int>(s.h.terms.terms().size()));
  }
}

TEST_CASE("term families by band membership") {
  const oneparticle::KineticBasis kin(1, 2.0 * kPi, 1);
  const auto band = build_band(kin, 0.3);  // mode 0 only
  auto one = [&](int c, int a) {
    manybody::Term t;
    t.n_create = t.n_annihilate = 1;
    t.creators[0] = c;
    t.annihilators[0] = a;
    return term_family(t, band);
  };
  CHECK(one(0, 0) == 1);
  CHECK(one(1, 1) == 2);
  CHECK(one(0, 1) == 3);
  CHECK(one(1, 0) == 4);
  CHECK(one(1, 2) == 5);
  auto two = [&](int kq, int kpq, int kp, int k) {
    manybody::Term t;
    t.n_create = t.n_annihilate = 2;
    t.creators = {kq, kpq};
    t.annihilators = {kp, k};
    return term_family(t, band);
  };
  // outer (k, k') in {BB, BC, CB, CC}, inner (k+q, k'-q) in {CC, BC, CB, BB}.
  CHECK(two(0, 0, 0, 0) == 6 + 0 + 3);
  CHECK(two(1, 2, 0, 0) == 6 + 0 + 0);
  CHECK(two(0, 1, 1, 0) == 6 + 4 * 1 + 1);
  CHECK(two(1, 0, 0, 1) == 6 + 4 * 2 + 2);
  CHECK(two(1, 2, 2, 1) == 6 + 12 + 0);
  CHECK(two(0, 0, 2, 1) == 6 + 12 + 3);
  manybody::Term lin;
  lin.n_create = 1;
  lin.creators[0] = 0;
  CHECK(term_family(lin, band) == 0);
}

TEST_CASE("coherent vectors") {
  const auto b = fock::build_basis(2, 30);
  CoherentPoint c(2);
  c << cplx(1.0, 0.5), cplx(-0.7, 0.2);
  const auto v = coherent_vector(*b, c);
  CHECK(v.amplitudes.norm() == doctest::Approx(1.0));
  CHECK(v.tail_mass < 1e-15);
  // <c| a_k |c> = c_k.
  for (int k = 0; k < 2; ++k) {
    const auto a = fock::ladder(b, k, fock::Ladder::annihilate).matrix;
    const cplx m = v.amplitudes.dot(a * v.amplitudes);
    CHECK(std::abs(m - c[k]) < 1e-12);
  }
  CoherentPoint bad(1);
  CHECK_THROWS_AS(coherent_vector(*b, bad), ConfigError);
}

TEST_CASE("kappa bound holds with the convex sign") {
  const auto s = three_modes(1, -0.5);
  const auto band = build_band(s.kinetic, 0.3);
  const SymbolEvaluator ev(s.h.terms, band, complement_basis(band, 4));
  const KappaBoundTerms terms{band_trace(s.h.one_particle, band, -0.5), 0.5, 1.0};
  for (const auto& c : random_points(20, 1, 3.0, 9)) CHECK(kappa_bound_excess(ev, c, terms) <= 1e-10);
  CHECK(kappa_bound_excess(ev, CoherentPoint::Zero(1), terms) <= 1e-10);
}

TEST_CASE("Gauss rules integrate polynomials exactly") {
  const auto gl = gauss_legendre(8, -1.0, 2.0);
  for (int p = 0; p < 16; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], p);
    CHECK(s == doctest::Approx((std::pow(2.0, p + 1) - std::pow(-1.0, p + 1)) / (p + 1)));
  }
  const auto lg = gauss_laguerre(10);
  for (int p = 0; p < 20; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < lg.nodes.size(); ++i) s += lg.weights[i] * std::pow(lg.nodes[i], p);
    CHECK(s == doctest::Approx(factorial(p)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(gauss_legendre(0, 0.0, 1.0), ConfigError);
}

TEST_CASE("c-plane quadrature of a Gaussian") {
  const auto r = cplane_quadrature([](const CoherentPoint& c) { return cplx(std::exp(-c.squaredNorm())); },
                                   {3.0}, 32, 16);
  CHECK(r.value.real() == doctest::Approx(1.0 - std::exp(-9.0)).epsilon(1e-10));
  CHECK(r.tail_bound == doctest::Approx(std::exp(-9.0)));
  const auto two = cplane_quadrature(
      [](const CoherentPoint& c) { return cplx(std::norm(c[0]) * std::exp(-c.squaredNorm())); }, {6.0, 6.0},
      32, 8);
  CHECK(two.value.real() == doctest::Approx(1.0).epsilon(1e-8));
  const auto mc = monte_carlo_plane([](const CoherentPoint& c) { return std::exp(-c.squaredNorm()); },
                                    {3.0}, 200000, 3);
  CHECK(std::abs(mc.value - 1.0) < 5.0 * mc.standard_error + 1e-3);
}
