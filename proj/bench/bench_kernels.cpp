// Timing comparison of the OpenMP kernels against their serial reference
// implementations: walker advancement, dense matrix powers, and the
// multi-run sweep driver.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <vector>

#include "rsim/driver.hpp"
#include "rsim/mobility.hpp"
#include "rsim/sim.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double seconds(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %.2fx\n", name,
              serial, parallel, serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel kernels run serially\n");
#endif

  {
    auto a = rsim::mobility::make_walkers(1001, 1u << 20, 1);
    auto b = a;
    const double ts = seconds([&] {
      for (int t = 0; t < 64; ++t) rsim::mobility::advance_serial(a);
    });
    const double tp = seconds([&] {
      for (int t = 0; t < 64; ++t) rsim::mobility::advance(b);
    });
    if (a.cells != b.cells) {
      std::printf("walker advance: MISMATCH between serial and parallel\n");
      return 1;
    }
    report("walker advance (1M nodes)", ts, tp);
  }

  {
    const auto p = rsim::mobility::transition_matrix(31);
    rsim::mobility::Matrix s = p, q = p;
    const double ts = seconds([&] {
      for (int t = 0; t < 6; ++t) s = rsim::mobility::multiply_serial(s, p);
    });
    const double tp = seconds([&] {
      for (int t = 0; t < 6; ++t) q = rsim::mobility::multiply(q, p);
    });
    if (s.a != q.a) {
      std::printf("matrix power: MISMATCH between serial and parallel\n");
      return 1;
    }
    report("matrix powers (961x961)", ts, tp);
  }

  {
    std::vector<rsim::sim::Config> configs;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      rsim::sim::Config cfg;
      cfg.n = 225;
      cfg.delta = std::numbers::sqrt2 - 1.0;
      cfg.p_s = 0.5;
      cfg.delta_ratio = 1.0 / 9.0;
      cfg.horizon = 40 * 225;
      cfg.warmup = 4 * 225;
      cfg.seed = seed;
      configs.push_back(cfg);
    }
    std::vector<rsim::driver::RunRow> rs, rp;
    const double ts = seconds([&] { rs = rsim::driver::run_many(configs, 1); });
    const double tp = seconds([&] { rp = rsim::driver::run_many(configs, 0); });
    for (std::size_t i = 0; i < rs.size(); ++i)
      if (rs[i].to_csv() != rp[i].to_csv()) {
        std::printf("sweep driver: MISMATCH between serial and parallel rows\n");
        return 1;
      }
    report("sweep driver (4 runs)", ts, tp);
  }
  return 0;
}
