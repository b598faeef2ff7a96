// Times the OpenMP kernels against their serial reference paths.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "ewanet/equilibria.hpp"
#include "ewanet/graph.hpp"
#include "ewanet/montecarlo.hpp"
#include "ewanet/nash.hpp"

using namespace ewanet;

namespace {

template <typename F>
double time_ms(F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());

  {
    const Graph g = erdos_renyi(18, 0.3, 11, true, 2000);
    const PayoffMatrix payoff = PayoffMatrix::make(3, -5, 0, 2);
    std::vector<NeRecord> a, b;
    const double ts = time_ms([&] { a = enumerate_pure_ne(g, payoff, 20, false); });
    const double tp = time_ms([&] { b = enumerate_pure_ne(g, payoff, 20, true); });
    report("pure NE enumeration (n=18)", ts, tp);
    if (a.size() != b.size()) std::printf("  MISMATCH: %zu vs %zu\n", a.size(), b.size());
  }

  {
    const Graph g = erdos_renyi(10, 0.4, 3, true, 2000);
    const PayoffMatrix payoff = PayoffMatrix::make(3, -5, 0, 2);
    const auto params = BehavioralParams::uniform(10, 0.5, 2.0, 1.0);
    CensusOptions opt;
    opt.random_starts = 128;
    BECensus a, b;
    opt.parallel = false;
    const double ts = time_ms([&] { a = find_fixed_points(g, payoff, params, opt); });
    opt.parallel = true;
    const double tp = time_ms([&] { b = find_fixed_points(g, payoff, params, opt); });
    report("fixed-point census (n=10)", ts, tp);
    if (a.records.size() != b.records.size())
      std::printf("  MISMATCH: %zu vs %zu roots\n", a.records.size(), b.records.size());
  }

  {
    ExperimentConfig cfg;
    cfg.n_sims = 40;
    cfg.n = 60;
    cfg.horizon = 300;
    std::vector<SimRecord> a, b;
    cfg.parallel = false;
    const double ts = time_ms([&] { a = run_battery(cfg); });
    cfg.parallel = true;
    const double tp = time_ms([&] { b = run_battery(cfg); });
    report("simulation battery (40x60)", ts, tp);
    if (!(a == b)) std::printf("  MISMATCH: parallel battery differs from serial\n");
  }

  return 0;
}
