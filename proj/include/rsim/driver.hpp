#pragma once
// Experiment orchestration: one-run summaries, fixed-layout CSV rows,
// manifests, and the parallel multi-run driver used by sweeps.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rsim/metrics.hpp"
#include "rsim/sim.hpp"

namespace rsim::driver {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct RunRow {
  std::string scheme;
  std::uint32_t n = 0;
  double delta_param = 0.0;
  double p_s = 0.0;
  double delta_ratio = 0.0;
  std::uint32_t m = 0;
  std::uint64_t seed = 0;
  std::uint64_t horizon = 0;
  std::uint64_t warmup = 0;
  double mean_delay = 0.0;  // NaN when the window saw no decode
  double p50_delay = 0.0;
  double p95_delay = 0.0;
  double throughput = 0.0;
  double send_span_mean = 0.0;   // NaN for the uncoded scheme
  double relay_wait_mean = 0.0;
  double collect_span_mean = 0.0;
  bool unstable = false;
  double theta_eff = 0.0;  // not a CSV column; carried for summaries

  static std::string csv_header();
  std::string to_csv() const;
};

RunRow summarize(const sim::Result& result);

// Runs every config, in parallel when workers != 1 (0 = library default
// thread count).  Row order matches the input order regardless of the
// worker count.
std::vector<RunRow> run_many(std::span<const sim::Config> configs, int workers = 0);

struct PointAggregate {
  std::string param;
  double value = 0.0;
  std::string scheme;
  std::uint32_t n = 0;
  double p_s = 0.0;
  double delta_ratio = 0.0;
  std::uint32_t m = 0;
  std::uint32_t seeds = 0;
  double mean_delay = 0.0;  // mean over per-seed means
  double sd_delay = 0.0;
  double mean_throughput = 0.0;
  double mean_send_span = 0.0;
  double mean_relay_wait = 0.0;
  double mean_collect_span = 0.0;
  std::uint32_t unstable_runs = 0;

  static std::string csv_header();
  std::string to_csv() const;
};

PointAggregate aggregate(const std::string& param, double value,
                         std::span<const RunRow> rows);

class Manifest {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, std::uint64_t value);
  std::string text() const;  // key=value lines

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Formatting helpers shared by every CSV writer (fixed precision so equal
// configurations produce byte-identical rows).
std::string fmt_double(double v, int decimals);
std::string fmt_general(double v);

// Refuses to overwrite an existing path unless force is set.
void write_file(const std::string& path, const std::string& contents, bool force);

}  // namespace rsim::driver
