// Serial reference vs OpenMP kernels. Usage: bench_kernels [threads] [repeats]
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "bogolab/fock.hpp"
#include "bogolab/kernels.hpp"
#include "bogolab/manybody.hpp"
#include "bogolab/oneparticle.hpp"
#include "bogolab/symbols.hpp"

using namespace bogolab;
using kernels::Exec;

namespace {

template <class F>
double best_of(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-24s serial %9.4f s  parallel %9.4f s  speedup %5.2f  %s\n", name, serial, parallel,
              serial / parallel, same ? "identical" : "DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : kernels::thread_count();
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  kernels::set_thread_count(threads);
  std::printf("threads %d, best of %d\n", kernels::thread_count(), repeats);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  std::vector<double> energies(1 << 22);
  for (auto& e : energies) e = u(rng);
  double a = 0.0, b = 0.0;
  const double ts = best_of(repeats, [&] { a = kernels::bose_sum(energies, 1.0, -0.1, Exec::serial); });
  const double tp = best_of(repeats, [&] { b = kernels::bose_sum(energies, 1.0, -0.1, Exec::parallel); });
  row("bose_sum (4M modes)", ts, tp, a == b);

  const oneparticle::KineticBasis kin(1, 2.0 * kPi, 2);
  const auto pot = oneparticle::sample_potential(1, 2.0 * kPi, 2.0 * kPi / 8.0, 1.0, 0.5, 1);
  const auto h = manybody::assemble_full(kin, oneparticle::diagonalize(kin, pot), {0.5, 1.0}, -0.5);
  const auto basis = fock::build_basis(h.mode_count(), 8);
  fock::SparseMatrix ms, mp;
  const double as = best_of(repeats, [&] { ms = kernels::assemble(h.terms, *basis, Exec::serial); });
  const double ap = best_of(repeats, [&] { mp = kernels::assemble(h.terms, *basis, Exec::parallel); });
  row("assemble (5 modes, N<=8)", as, ap, fock::max_abs(fock::SparseMatrix(ms - mp)) == 0.0);

  const auto band = symbols::build_band(oneparticle::KineticBasis(1, 2.0 * kPi, 1), 0.3);
  const auto h3 = manybody::assemble_full(oneparticle::KineticBasis(1, 2.0 * kPi, 1),
                                          oneparticle::diagonalize(oneparticle::KineticBasis(1, 2.0 * kPi, 1), pot),
                                          {0.5, 1.0}, -0.5);
  const symbols::SymbolEvaluator ev(h3.terms, band, symbols::complement_basis(band, 8));
  const auto nodes = symbols::disk_rule(48, 64, 6.0);
  auto node_value = [&](std::size_t i) {
    symbols::CoherentPoint c(1);
    c[0] = nodes[i].c;
    return ev.lower(c).trace().real();
  };
  std::vector<double> vs, vp;
  const double ns = best_of(repeats, [&] { vs = kernels::evaluate_nodes(nodes.size(), node_value, Exec::serial); });
  const double np = best_of(repeats, [&] { vp = kernels::evaluate_nodes(nodes.size(), node_value, Exec::parallel); });
  row("quadrature nodes (3072)", ns, np, vs == vp);
  return 0;
}
