#include "rsim/driver.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rsim::driver {

std::string fmt_double(double v, int decimals) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string fmt_general(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string RunRow::csv_header() {
  return "scheme,n,delta_param,p_s,delta_ratio,m,seed,horizon,warmup,"
         "mean_delay_slots,p50_delay,p95_delay,throughput_pkts_per_slot_per_pair,"
         "send_span_mean,relay_wait_mean,collect_span_mean,unstable_flag";
}

std::string RunRow::to_csv() const {
  std::string out;
  out += scheme;
  out += ',' + std::to_string(n);
  out += ',' + fmt_double(delta_param, 8);
  out += ',' + fmt_double(p_s, 4);
  out += ',' + fmt_double(delta_ratio, 8);
  out += ',' + std::to_string(m);
  out += ',' + std::to_string(seed);
  out += ',' + std::to_string(horizon);
  out += ',' + std::to_string(warmup);
  out += ',' + fmt_double(mean_delay, 4);
  out += ',' + fmt_double(p50_delay, 4);
  out += ',' + fmt_double(p95_delay, 4);
  out += ',' + fmt_double(throughput, 9);
  out += ',' + fmt_double(send_span_mean, 4);
  out += ',' + fmt_double(relay_wait_mean, 4);
  out += ',' + fmt_double(collect_span_mean, 4);
  out += ',' + std::string(unstable ? "1" : "0");
  return out;
}

RunRow summarize(const sim::Result& result) {
  RunRow row;
  row.scheme = sim::scheme_name(result.config.scheme);
  row.n = result.config.n;
  row.delta_param = result.config.delta;
  row.p_s = result.config.p_s;
  row.delta_ratio = result.config.delta_ratio;
  row.m = result.m;
  row.seed = result.config.seed;
  row.horizon = result.config.horizon;
  row.warmup = result.config.warmup;
  row.theta_eff = result.theta_eff;
  const auto windowed = metrics::window_records(result);
  if (windowed.empty()) {
    row.mean_delay = row.p50_delay = row.p95_delay =
        std::numeric_limits<double>::quiet_NaN();
  } else {
    const auto d = metrics::delay(windowed, result.config.n);
    row.mean_delay = d.mean;
    row.p50_delay = d.p50;
    row.p95_delay = d.p95;
  }
  row.throughput = metrics::throughput(result).mean_per_pair_per_slot;
  if (result.config.scheme == sim::Scheme::kCoded) {
    const auto dec = metrics::decompose(result);
    if (dec.generations > 0) {
      row.send_span_mean = dec.send_span_mean;
      row.relay_wait_mean = dec.relay_wait_mean;
      row.collect_span_mean = dec.collect_span_mean;
    } else {
      row.send_span_mean = row.relay_wait_mean = row.collect_span_mean =
          std::numeric_limits<double>::quiet_NaN();
    }
  } else {
    row.send_span_mean = row.relay_wait_mean = row.collect_span_mean =
        std::numeric_limits<double>::quiet_NaN();
  }
  row.unstable = result.unstable;
  return row;
}

std::vector<RunRow> run_many(std::span<const sim::Config> configs, int workers) {
  std::vector<RunRow> rows(configs.size());
  const auto count = static_cast<std::int64_t>(configs.size());
  if (workers == 1) {
    for (std::int64_t i = 0; i < count; ++i)
      rows[static_cast<std::size_t>(i)] =
          summarize(sim::run(configs[static_cast<std::size_t>(i)]));
    return rows;
  }
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers > 0 ? workers : omp_get_max_threads())
  for (std::int64_t i = 0; i < count; ++i)
    rows[static_cast<std::size_t>(i)] =
        summarize(sim::run(configs[static_cast<std::size_t>(i)]));
  return rows;
}

std::string PointAggregate::csv_header() {
  return "param,value,scheme,n,p_s,delta_ratio,m,seeds,mean_delay_slots,"
         "sd_delay_slots,mean_throughput,mean_send_span,mean_relay_wait,"
         "mean_collect_span,unstable_runs";
}

std::string PointAggregate::to_csv() const {
  std::string out;
  out += param;
  out += ',' + fmt_general(value);
  out += ',' + scheme;
  out += ',' + std::to_string(n);
  out += ',' + fmt_double(p_s, 4);
  out += ',' + fmt_double(delta_ratio, 8);
  out += ',' + std::to_string(m);
  out += ',' + std::to_string(seeds);
  out += ',' + fmt_double(mean_delay, 4);
  out += ',' + fmt_double(sd_delay, 4);
  out += ',' + fmt_double(mean_throughput, 9);
  out += ',' + fmt_double(mean_send_span, 4);
  out += ',' + fmt_double(mean_relay_wait, 4);
  out += ',' + fmt_double(mean_collect_span, 4);
  out += ',' + std::to_string(unstable_runs);
  return out;
}

PointAggregate aggregate(const std::string& param, double value,
                         std::span<const RunRow> rows) {
  if (rows.empty()) throw std::invalid_argument("driver: empty aggregate");
  PointAggregate agg;
  agg.param = param;
  agg.value = value;
  agg.scheme = rows[0].scheme;
  agg.n = rows[0].n;
  agg.p_s = rows[0].p_s;
  agg.delta_ratio = rows[0].delta_ratio;
  agg.m = rows[0].m;
  agg.seeds = static_cast<std::uint32_t>(rows.size());
  double sum = 0.0, sum2 = 0.0, thr = 0.0, send = 0.0, wait = 0.0, coll = 0.0;
  std::uint32_t delay_count = 0, span_count = 0;
  for (const auto& r : rows) {
    if (!std::isnan(r.mean_delay)) {
      sum += r.mean_delay;
      sum2 += r.mean_delay * r.mean_delay;
      ++delay_count;
    }
    thr += r.throughput;
    if (!std::isnan(r.send_span_mean)) {
      send += r.send_span_mean;
      wait += r.relay_wait_mean;
      coll += r.collect_span_mean;
      ++span_count;
    }
    if (r.unstable) ++agg.unstable_runs;
  }
  if (delay_count > 0) {
    agg.mean_delay = sum / delay_count;
    const double var =
        delay_count > 1
            ? (sum2 - sum * sum / delay_count) / static_cast<double>(delay_count - 1)
            : 0.0;
    agg.sd_delay = std::sqrt(std::max(0.0, var));
  } else {
    agg.mean_delay = agg.sd_delay = std::numeric_limits<double>::quiet_NaN();
  }
  agg.mean_throughput = thr / static_cast<double>(rows.size());
  if (span_count > 0) {
    agg.mean_send_span = send / span_count;
    agg.mean_relay_wait = wait / span_count;
    agg.mean_collect_span = coll / span_count;
  } else {
    agg.mean_send_span = agg.mean_relay_wait = agg.mean_collect_span =
        std::numeric_limits<double>::quiet_NaN();
  }
  return agg;
}

void Manifest::add(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}
void Manifest::add(const std::string& key, double value) {
  entries_.emplace_back(key, fmt_general(value));
}
void Manifest::add(const std::string& key, std::uint64_t value) {
  entries_.emplace_back(key, std::to_string(value));
}

std::string Manifest::text() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& contents, bool force) {
  if (!force && std::filesystem::exists(path))
    throw std::runtime_error("refusing to overwrite existing file " + path +
                             " (use --force)");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
}

}  // namespace rsim::driver
