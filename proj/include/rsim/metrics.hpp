#pragma once
// Aggregation of run output: throughput, delay statistics, the
// per-generation delay decomposition, and scaling-law model fits.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rsim/sim.hpp"

namespace rsim::metrics {

struct DelayStats {
  double mean = 0.0;    // per-pair means averaged over pairs with data
  double p50 = 0.0;     // nearest-rank quantiles over all records
  double p95 = 0.0;
  std::size_t count = 0;
  std::size_t pairs_with_data = 0;
};

// Records whose decode slot falls in (warmup, horizon].
std::vector<sim::DelayRecord> window_records(const sim::Result& r);

// Throws std::invalid_argument on an empty record set.
DelayStats delay(std::span<const sim::DelayRecord> records, std::uint32_t n_pairs);

struct Throughput {
  std::vector<std::uint32_t> per_pair;  // decoded packets in the window
  std::uint64_t window = 0;
  std::uint64_t total = 0;
  double mean_per_pair_per_slot = 0.0;
};

Throughput throughput(const sim::Result& r);

struct Decomposition {
  double send_span_mean = 0.0;    // first to n-th version emission
  double relay_wait_mean = 0.0;   // first emission to first arrival (proxy)
  double collect_span_mean = 0.0; // first to m-th distinct arrival
  std::size_t generations = 0;    // decoded in the window
  std::size_t send_complete = 0;  // of those, emission finished in-horizon
};

// Coded runs only; throws std::invalid_argument when the run carries no
// decomposition data (uncoded scheme).
Decomposition decompose(const sim::Result& r);

struct ScalingFit {
  double coef_linear = 0.0;  // a in D = a n
  double r2_linear = 0.0;
  double coef_nlogn = 0.0;   // a in D = a n ln n
  double r2_nlogn = 0.0;
  bool prefers_linear = false;
};

// Least-squares fits through the origin over (n, delay) points; needs at
// least three distinct n and a non-degenerate response.
ScalingFit fit_scaling(std::span<const std::pair<double, double>> points);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};

// Ordinary simple regression y = a + b x, for shape checks.
LineFit fit_line(std::span<const std::pair<double, double>> points);

}  // namespace rsim::metrics
