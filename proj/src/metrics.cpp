#include "rsim/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace rsim::metrics {

std::vector<sim::DelayRecord> window_records(const sim::Result& r) {
  std::vector<sim::DelayRecord> out;
  for (const auto& rec : r.records)
    if (rec.decode_slot > r.config.warmup && rec.decode_slot <= r.config.horizon)
      out.push_back(rec);
  return out;
}

DelayStats delay(std::span<const sim::DelayRecord> records, std::uint32_t n_pairs) {
  if (records.empty())
    throw std::invalid_argument("metrics: no delay records");
  std::vector<double> pair_sum(n_pairs, 0.0);
  std::vector<std::uint64_t> pair_count(n_pairs, 0);
  std::vector<double> all;
  all.reserve(records.size());
  for (const auto& rec : records) {
    const auto d = static_cast<double>(rec.decode_slot - rec.start_slot);
    pair_sum[rec.pair] += d;
    ++pair_count[rec.pair];
    all.push_back(d);
  }
  DelayStats out;
  double mean_acc = 0.0;
  for (std::uint32_t p = 0; p < n_pairs; ++p) {
    if (pair_count[p] == 0) continue;
    mean_acc += pair_sum[p] / static_cast<double>(pair_count[p]);
    ++out.pairs_with_data;
  }
  out.mean = mean_acc / static_cast<double>(out.pairs_with_data);
  std::sort(all.begin(), all.end());
  auto rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(all.size()))) ;
    return all[idx == 0 ? 0 : idx - 1];
  };
  out.p50 = rank(0.50);
  out.p95 = rank(0.95);
  out.count = all.size();
  return out;
}

Throughput throughput(const sim::Result& r) {
  Throughput out;
  out.per_pair.assign(r.config.n, 0);
  out.window = r.config.horizon - r.config.warmup;
  for (const auto& rec : r.records)
    if (rec.decode_slot > r.config.warmup && rec.decode_slot <= r.config.horizon) {
      ++out.per_pair[rec.pair];
      ++out.total;
    }
  if (out.window > 0)
    out.mean_per_pair_per_slot =
        static_cast<double>(out.total) /
        (static_cast<double>(out.window) * static_cast<double>(r.config.n));
  return out;
}

Decomposition decompose(const sim::Result& r) {
  if (r.config.scheme != sim::Scheme::kCoded)
    throw std::invalid_argument("metrics: no decomposition data for this scheme");
  Decomposition out;
  double send = 0.0, wait = 0.0, collect = 0.0;
  for (const auto& gs : r.spans) {
    if (gs.decode_slot <= r.config.warmup || gs.decode_slot > r.config.horizon)
      continue;
    ++out.generations;
    wait += static_cast<double>(gs.first_arrival - gs.first_emit);
    collect += static_cast<double>(gs.decode_slot - gs.first_arrival);
    if (gs.last_emit != sim::kNoSlot) {
      send += static_cast<double>(gs.last_emit - gs.first_emit);
      ++out.send_complete;
    }
  }
  if (out.generations > 0) {
    wait /= static_cast<double>(out.generations);
    collect /= static_cast<double>(out.generations);
    out.relay_wait_mean = wait;
    out.collect_span_mean = collect;
  }
  if (out.send_complete > 0)
    out.send_span_mean = send / static_cast<double>(out.send_complete);
  return out;
}

namespace {

struct OriginFit {
  double coef = 0.0;
  double r2 = 0.0;
};

OriginFit fit_origin(std::span<const std::pair<double, double>> pts,
                     double (*shape)(double)) {
  double sxy = 0.0, sxx = 0.0, sy = 0.0;
  for (const auto& [n, y] : pts) {
    const double x = shape(n);
    sxy += x * y;
    sxx += x * x;
    sy += y;
  }
  OriginFit f;
  f.coef = sxy / sxx;
  const double mean = sy / static_cast<double>(pts.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& [n, y] : pts) {
    const double e = y - f.coef * shape(n);
    ss_res += e * e;
    ss_tot += (y - mean) * (y - mean);
  }
  if (ss_tot <= 0.0)
    throw std::invalid_argument("metrics: degenerate points (constant response)");
  f.r2 = 1.0 - ss_res / ss_tot;
  return f;
}

}  // namespace

ScalingFit fit_scaling(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3)
    throw std::invalid_argument("metrics: scaling fit needs at least 3 points");
  std::vector<double> ns;
  for (const auto& [n, y] : points) ns.push_back(n);
  std::sort(ns.begin(), ns.end());
  if (std::unique(ns.begin(), ns.end()) - ns.begin() < 3)
    throw std::invalid_argument("metrics: scaling fit needs 3 distinct n");
  const auto lin = fit_origin(points, +[](double n) { return n; });
  const auto nlogn = fit_origin(points, +[](double n) { return n * std::log(n); });
  ScalingFit out;
  out.coef_linear = lin.coef;
  out.r2_linear = lin.r2;
  out.coef_nlogn = nlogn.coef;
  out.r2_nlogn = nlogn.r2;
  out.prefers_linear = lin.r2 >= nlogn.r2;
  return out;
}

LineFit fit_line(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2)
    throw std::invalid_argument("metrics: line fit needs at least 2 points");
  const auto n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("metrics: degenerate x values");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double mean = sy / n;
  for (const auto& [x, y] : points) {
    const double e = y - (f.intercept + f.slope * x);
    ss_res += e * e;
    ss_tot += (y - mean) * (y - mean);
  }
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace rsim::metrics
