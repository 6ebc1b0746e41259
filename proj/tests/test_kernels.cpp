#include "doctest.h"

#include <random>

#include "bogolab/kernels.hpp"
#include "bogolab/manybody.hpp"
#include "bogolab/oneparticle.hpp"

using namespace bogolab;
using namespace bogolab::kernels;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng) * std::pow(10.0, 4.0 * u(rng));
  return v;
}

}  // namespace

TEST_CASE("chunked sum is bitwise independent of the thread count") {
  const auto v = random_values(100003, 1);
  const int saved = thread_count();
  set_thread_count(1);
  const double one = chunked_sum(v);
  for (int t : {2, 3, 8}) {
    set_thread_count(t);
    CHECK(chunked_sum(v) == one);
  }
  set_thread_count(saved);
  CHECK(chunked_sum(v, Exec::serial) == one);
  CHECK(one == doctest::Approx(serial_sum(v)).epsilon(1e-9));
}

TEST_CASE("bose sum matches the reference") {
  std::vector<double> e(50000), w(50000);
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = 1e-4 * static_cast<double>(i);
    w[i] = 1.0 + static_cast<double>(i % 7);
  }
  const double ref = bose_sum_reference(e, 1.3, -0.01);
  CHECK(bose_sum(e, 1.3, -0.01) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(bose_sum(e, w, 1.3, -0.01) == doctest::Approx(bose_sum_reference(e, w, 1.3, -0.01)).epsilon(1e-12));
  // Serial and parallel kernels agree bitwise.
  CHECK(bose_sum(e, 1.3, -0.01, Exec::serial) == bose_sum(e, 1.3, -0.01, Exec::parallel));
  // Single level.
  const std::vector<double> one{0.5};
  CHECK(bose_sum(one, 2.0, 0.0) == doctest::Approx(1.0 / std::expm1(1.0)));
}

TEST_CASE("parallel assembly equals serial assembly") {
  const oneparticle::KineticBasis kin(1, 5.0, 2);
  const auto pot = oneparticle::sample_potential(1, 5.0, 1.0, 1.0, 0.5, 4);
  const auto h = manybody::assemble_full(kin, oneparticle::diagonalize(kin, pot), {0.7, 1.0}, -0.1);
  const auto b = fock::build_basis(5, 5);
  const int saved = thread_count();
  set_thread_count(4);
  const auto par = assemble(h.terms, *b, Exec::parallel);
  set_thread_count(saved);
  const auto ser = assemble(h.terms, *b, Exec::serial);
  CHECK(fock::max_abs(fock::SparseMatrix(par - ser)) == 0.0);
  CHECK(par.nonZeros() == ser.nonZeros());
}

TEST_CASE("evaluate_nodes preserves order") {
  const auto v = evaluate_nodes(1000, [](std::size_t i) { return static_cast<double>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<double>(i * i));
}

TEST_CASE("thread count validation") {
  CHECK_THROWS_AS(set_thread_count(0), ConfigError);
  CHECK(thread_count() >= 1);
}
