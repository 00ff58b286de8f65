// Times the OpenMP exRec kernel against the serial shot-by-shot reference.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "catft/exrec.hpp"

using namespace catft;

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  ExRecConfig cfg;
  cfg.gadget.scheme = Scheme::Hybrid;
  cfg.gadget.N = 2;
  cfg.gadget.input.alpha = cfg.gadget.ancilla.alpha = 3.0;
  cfg.op_noise = {1e-3, 1e-3};
  cfg.shots = argc > 1 ? std::atol(argv[1]) : 2000;
  cfg.batches = 50;
  cfg.seed = 7;

  ChoiAccumulator a, b;
  const double ts = seconds([&] { b = run_exrec_serial(cfg); });
  std::printf("serial   : %8.3f s  (%.3f ms/shot)\n", ts, 1e3 * ts / cfg.shots);
  for (int t = 1; t <= omp_get_max_threads(); t *= 2) {
    const double tp = seconds([&] { a = run_exrec(cfg, t); });
    std::printf("openmp %2d: %8.3f s  (%.3f ms/shot)  speedup %.2f\n", t, tp, 1e3 * tp / cfg.shots, ts / tp);
  }
  const double diff = (a.average() - b.average()).norm();
  std::printf("max |choi_parallel - choi_serial|_F = %.3e\n", diff);
  return diff < 1e-10 ? 0 : 1;
}
