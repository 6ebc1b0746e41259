#include "bogolab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include <omp.h>

namespace bogolab::kernels {

namespace {

int initial_threads() {
  if (const char* env = std::getenv("BOGOLAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1, omp_get_max_threads());
}

int& threads() {
  static int n = initial_threads();
  return n;
}

}  // namespace

int thread_count() { return threads(); }

void set_thread_count(int n) {
  if (n < 1) throw ConfigError("thread count must be >= 1");
  threads() = n;
}

double serial_sum(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

double chunked_sum(std::span<const double> values, Exec exec) {
  const std::size_t chunks = (values.size() + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
  auto body = [&](std::size_t c) {
    const std::size_t lo = c * kChunk, hi = std::min(values.size(), lo + kChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    partial[c] = s;
  };
  if (exec == Exec::serial) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
  } else {
    const long long n = static_cast<long long>(chunks);
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (long long c = 0; c < n; ++c) body(static_cast<std::size_t>(c));
  }
  return serial_sum(partial);
}

double bose_sum_reference(std::span<const double> energies, double beta, double mu) {
  double s = 0.0;
  for (double e : energies) s += 1.0 / std::expm1(beta * (e - mu));
  return s;
}

double bose_sum(std::span<const double> energies, double beta, double mu, Exec exec) {
  const std::size_t chunks = (energies.size() + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
  auto body = [&](std::size_t c) {
    const std::size_t lo = c * kChunk, hi = std::min(energies.size(), lo + kChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += 1.0 / std::expm1(beta * (energies[i] - mu));
    partial[c] = s;
  };
  if (exec == Exec::serial) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
  } else {
    const long long n = static_cast<long long>(chunks);
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (long long c = 0; c < n; ++c) body(static_cast<std::size_t>(c));
  }
  return serial_sum(partial);
}

double bose_sum_reference(std::span<const double> energies, std::span<const double> weights,
                          double beta, double mu) {
  double s = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) s += weights[i] / std::expm1(beta * (energies[i] - mu));
  return s;
}

double bose_sum(std::span<const double> energies, std::span<const double> weights, double beta,
                double mu, Exec exec) {
  if (weights.size() != energies.size()) throw ConfigError("bose_sum: weight count mismatch");
  const std::size_t chunks = (energies.size() + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
  auto body = [&](std::size_t c) {
    const std::size_t lo = c * kChunk, hi = std::min(energies.size(), lo + kChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += weights[i] / std::expm1(beta * (energies[i] - mu));
    partial[c] = s;
  };
  if (exec == Exec::serial) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
  } else {
    const long long n = static_cast<long long>(chunks);
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (long long c = 0; c < n; ++c) body(static_cast<std::size_t>(c));
  }
  return serial_sum(partial);
}

fock::SparseMatrix assemble(const manybody::Polynomial& p, const fock::OccupationBasis& basis,
                            Exec exec) {
  using Triplet = Eigen::Triplet<cplx>;
  const std::size_t dim = basis.size();
  std::vector<std::vector<Triplet>> columns(dim);

  auto column = [&](std::size_t j) {
    std::vector<int> n(basis.mode_count());
    auto& out = columns[j];
    if (p.scalar() != cplx(0.0))
      out.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j), p.scalar());
    for (const auto& t : p.terms()) {
      auto s = basis.state(j);
      std::copy(s.begin(), s.end(), n.begin());
      const double amp = manybody::apply_term(t, n);
      if (amp == 0.0) continue;
      if (auto i = basis.index_of(n))
        out.emplace_back(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(j), t.coeff * amp);
    }
  };

  if (exec == Exec::serial) {
    for (std::size_t j = 0; j < dim; ++j) column(j);
  } else {
    const long long n = static_cast<long long>(dim);
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count())
    for (long long j = 0; j < n; ++j) column(static_cast<std::size_t>(j));
  }

  std::vector<Triplet> all;
  std::size_t total = 0;
  for (const auto& c : columns) total += c.size();
  all.reserve(total);
  for (auto& c : columns) all.insert(all.end(), c.begin(), c.end());
  fock::SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(all.begin(), all.end());
  fock::prune(m);
  return m;
}

}  // namespace bogolab::kernels
