#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version. Parallel reductions use a chunk partition that does not
// depend on the thread count, so results are bit-identical for any number
// of threads.

#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "bogolab/fock.hpp"
#include "bogolab/manybody.hpp"

namespace bogolab::kernels {

enum class Exec { serial, parallel };

/// Fixed reduction chunk length.
inline constexpr std::size_t kChunk = 4096;

/// Threads used by parallel kernels. Initialized from BOGOLAB_THREADS when
/// set, otherwise the OpenMP default (available cores).
int thread_count();
void set_thread_count(int n);

/// Sum of chunk partials in index order; chunking fixed by kChunk.
double chunked_sum(std::span<const double> values, Exec exec = Exec::parallel);

/// Plain left-to-right sum.
double serial_sum(std::span<const double> values);

/// sum_i 1 / (exp(beta (e_i - mu)) - 1).
double bose_sum(std::span<const double> energies, double beta, double mu,
                Exec exec = Exec::parallel);
double bose_sum_reference(std::span<const double> energies, double beta, double mu);

/// sum_i w_i / (exp(beta (e_i - mu)) - 1) for energies with multiplicities w_i.
double bose_sum(std::span<const double> energies, std::span<const double> weights, double beta,
                double mu, Exec exec = Exec::parallel);
double bose_sum_reference(std::span<const double> energies, std::span<const double> weights,
                          double beta, double mu);

/// Builds the matrix column by column.
fock::SparseMatrix assemble(const manybody::Polynomial& p, const fock::OccupationBasis& basis,
                            Exec exec = Exec::parallel);

/// values[i] = f(i) for i in [0, count). `f` must be safe to call concurrently.
template <class F>
auto evaluate_nodes(std::size_t count, F&& f, Exec exec = Exec::parallel) {
  using T = std::decay_t<decltype(f(std::size_t{0}))>;
  std::vector<T> values(count);
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < count; ++i) values[i] = f(i);
    return values;
  }
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_count())
  for (long long i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
  return values;
}

}  // namespace bogolab::kernels
