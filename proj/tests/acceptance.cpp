// Acceptance suite: one pass/fail line per criterion, covering closed-form
// constants, coding correctness, mobility and scheduling statistics, the
// shape of the delay curves, scaling behavior, determinism and the mixing
// audit.  Run with --only N[,M...] to restrict, --list to enumerate.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rsim/driver.hpp"
#include "rsim/metrics.hpp"
#include "rsim/mobility.hpp"
#include "rsim/scheduler.hpp"
#include "rsim/selfcheck.hpp"
#include "rsim/sim.hpp"

namespace {

using namespace rsim;

struct Check {
  std::string label;
  bool ok;
};

struct Ctx {
  std::vector<Check> checks;
  void expect(bool ok, const std::string& label) { checks.push_back({label, ok}); }
  bool all_ok() const {
    for (const auto& c : checks)
      if (!c.ok) return false;
    return true;
  }
};

constexpr double kGuard = 0.41421356237309515;  // sqrt(2) - 1

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

sim::Config base_config(std::uint32_t n, std::uint64_t seed) {
  sim::Config cfg;
  cfg.n = n;
  cfg.delta = kGuard;
  cfg.p_s = 0.5;
  cfg.delta_ratio = 1.0 / 9.0;
  cfg.horizon = 400ull * n;
  cfg.warmup = 40ull * n;
  cfg.seed = seed;
  return cfg;
}

std::vector<driver::RunRow> seeds_of(sim::Config cfg, std::uint32_t seeds) {
  std::vector<sim::Config> configs;
  for (std::uint32_t s = 1; s <= seeds; ++s) {
    cfg.seed = s;
    configs.push_back(cfg);
  }
  return driver::run_many(configs, 0);
}

double mean_delay(const std::vector<driver::RunRow>& rows) {
  double sum = 0.0;
  std::size_t cnt = 0;
  for (const auto& r : rows)
    if (!std::isnan(r.mean_delay)) {
      sum += r.mean_delay;
      ++cnt;
    }
  return cnt > 0 ? sum / static_cast<double>(cnt) : std::nan("");
}

double mean_throughput(const std::vector<driver::RunRow>& rows) {
  double sum = 0.0;
  for (const auto& r : rows) sum += r.throughput;
  return sum / static_cast<double>(rows.size());
}

// ---- criterion 1: formula fidelity ----
void criterion_constants(Ctx& c) {
  const auto lat = scheduler::make_lattice(kGuard);
  c.expect(lat.spacing == 3 && lat.theta_prime == 1.0 / 9.0, "theta' = 1/9 exactly");
  const double t0 = scheduler::theta0(kGuard);
  c.expect(std::abs(t0 - 0.0294) <= 1e-4,
           "theta0 " + fmt(t0) + " within 1 last digit of 0.0294");
  const double p2l = scheduler::p2_limit(0.5, kGuard);
  c.expect(std::abs(p2l - 0.0147) <= 1e-4,
           "p2 " + fmt(p2l) + " within 1 last digit of 0.0147");
  const auto w = scheduler::c1_window(0.5, kGuard);
  c.expect(std::abs(w.lo - 2.123) <= 5e-4, "c1 window low " + fmt(w.lo) + " ~ 2.123");
  c.expect(std::abs(w.hi - 18.0) <= 1e-9, "c1 window high " + fmt(w.hi) + " = 18");
  // The quoted endpoints carry an arithmetic slack in their last digit; the
  // 4-decimal evaluation convention reproduces them to one unit in the 4th
  // mantissa digit (see README on reproducing quoted constants).
  const auto q = scheduler::delta_bound_window_4dp(0.5, kGuard);
  c.expect(std::abs(q.at_c1_lo - 1.4480e-4) <= 1e-7,
           "ratio bound low " + fmt(q.at_c1_lo, 8) + " vs quoted 1.4480e-4");
  c.expect(std::abs(q.at_c1_hi - 2.0176e-4) <= 1e-7,
           "ratio bound high " + fmt(q.at_c1_hi, 8) + " vs quoted 2.0176e-4");
}

// ---- criterion 2: Reed-Solomon correctness ----
void criterion_rs(Ctx& c) {
  const auto rt = selfcheck::check_rs_roundtrips(10000, 12345);
  c.expect(rt.ok(), "round-trips: " + std::to_string(rt.checks) + " checks, " +
                        std::to_string(rt.failures) + " failures");
  const auto mds = selfcheck::check_rs_mds();
  c.expect(mds.ok(), "minimum distance exact for (6,2) (6,3) (5,2)");
}

// ---- criterion 3: field axioms ----
void criterion_gf(Ctx& c) {
  const auto table = selfcheck::check_modulus_table();
  c.expect(table.ok(), "canonical modulus table re-derived");
  const auto ax = selfcheck::check_field_axioms(4);
  c.expect(ax.ok(), "axioms: " + std::to_string(ax.checks) + " checks, " +
                        std::to_string(ax.failures) + " failures");
}

// ---- criterion 4: mobility statistics ----
void criterion_mobility(Ctx& c) {
  for (const int side : {3, 8, 15}) {
    const auto stats = mobility::meeting_stats(side, 100000, 2024);
    const double n = static_cast<double>(side) * side;
    const double rel = std::abs(stats.mean - n) / n;
    std::string label = "inter-meeting mean, n=" + std::to_string(side * side) +
                        ": " + fmt(stats.mean) + " (rel err vs n: " + fmt(rel) + ")";
    if (side % 2 == 0) {
      // Even sides cannot reach the stated value: the difference walk is
      // reducible and the meeting-feasible class has mean return time n/2
      // (see the decisions ledger).  The stated check is kept as written.
      label += "  [conditional mean n/2 = " + fmt(n / 2.0) +
               ", measured/expected(n/2) = " + fmt(stats.mean / (n / 2.0)) + "]";
    }
    c.expect(rel < 0.05, label);
  }
  bool stochastic = true;
  for (int side = 1; side <= 16; ++side) {
    const auto p = mobility::transition_matrix(side);
    for (std::size_t i = 0; i < p.n; ++i) {
      double row = 0.0, col = 0.0;
      for (std::size_t j = 0; j < p.n; ++j) {
        row += p.at(i, j);
        col += p.at(j, i);
      }
      stochastic = stochastic && std::abs(row - 1.0) < 1e-12 && std::abs(col - 1.0) < 1e-12;
    }
  }
  c.expect(stochastic, "transition matrices doubly stochastic for L <= 16");
}

// ---- criterion 5: scheduling rates ----
void criterion_scheduling(Ctx& c) {
  const auto lat = scheduler::make_lattice(kGuard);
  const auto active = scheduler::active_cells(15, lat);
  auto walkers = mobility::init_uniform(225, 77);
  scheduler::Occupancy occ;
  constexpr std::uint64_t kSlots = 120000;
  std::uint64_t assignments = 0;
  std::vector<std::uint64_t> last_tx(225, 0);
  std::vector<bool> seen(225, false);
  double gap_sum = 0.0;
  std::uint64_t gap_count = 0;
  for (std::uint64_t t = 0; t < kSlots; ++t) {
    occ.build(walkers.cells, 225);
    const auto sched = scheduler::select_transmissions(occ, active, 0.5, 77, t);
    assignments += sched.assignments.size();
    for (const auto& a : sched.assignments) {
      if (seen[a.sender]) {
        gap_sum += static_cast<double>(t - last_tx[a.sender]);
        ++gap_count;
      }
      seen[a.sender] = true;
      last_tx[a.sender] = t;
    }
    mobility::advance(walkers);
  }
  const double etheta = scheduler::expected_theta(225, kGuard);
  const double frac = static_cast<double>(assignments) / (kSlots * 225.0);
  c.expect(std::abs(frac - etheta) / etheta < 0.02,
           "successful-transmission fraction " + fmt(frac) + " vs " + fmt(etheta));
  const double gap = gap_sum / static_cast<double>(gap_count);
  const double want = 1.0 / etheta;
  c.expect(std::abs(gap - want) / want < 0.05,
           "mean inter-transmission gap " + fmt(gap) + " vs " + fmt(want));
}

// ---- criterion 6: version-spread probes ----
void criterion_probes(Ctx& c) {
  auto cfg = base_config(225, 4242);
  cfg.warmup = 0;
  cfg.probe_samples = 120;
  cfg.probe_eta_window = 1000;
  const auto result = sim::run(cfg);
  c.expect(result.probes.size() >= 100,
           "tagged generations: " + std::to_string(result.probes.size()));
  if (result.probes.empty()) return;
  double phi = 0.0, eta = 0.0;
  for (const auto& p : result.probes) {
    phi += p.phi;
    eta += p.eta;
  }
  phi /= static_cast<double>(result.probes.size());
  eta /= static_cast<double>(result.probes.size());
  c.expect(phi >= 0.0130, "mean phi " + fmt(phi) + " >= 0.0130");
  c.expect(std::abs(eta - phi) <= 0.2 * phi,
           "mean eta " + fmt(eta) + " within 20% of mean phi " + fmt(phi));
}

// ---- criterion 7: delay vs source probability is U-shaped ----
void criterion_u_shape(Ctx& c) {
  std::map<double, double> delay_at;
  for (const double ps : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    auto cfg = base_config(225, 0);
    cfg.p_s = ps;
    delay_at[ps] = mean_delay(seeds_of(cfg, 5));
  }
  for (const auto& [ps, d] : delay_at)
    c.expect(!std::isnan(d), "p_s=" + fmt(ps) + ": mean delay " + fmt(d));
  c.expect(delay_at[0.1] >= 1.2 * delay_at[0.5],
           "delay(0.1)=" + fmt(delay_at[0.1]) + " >= 1.2 * delay(0.5)=" +
               fmt(delay_at[0.5]));
  c.expect(delay_at[0.9] >= 1.2 * delay_at[0.5],
           "delay(0.9)=" + fmt(delay_at[0.9]) + " >= 1.2 * delay(0.5)=" +
               fmt(delay_at[0.5]));
}

// ---- criterion 8: delay vs generation ratio ----
void criterion_ratio_curve(Ctx& c) {
  const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.8, 0.9};
  std::vector<double> delays;
  for (const double ratio : grid) {
    auto cfg = base_config(225, 0);
    cfg.delta_ratio = ratio;
    delays.push_back(mean_delay(seeds_of(cfg, 5)));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < delays.size(); ++i)
    monotone = monotone && delays[i] >= delays[i - 1];
  std::string curve;
  for (std::size_t i = 0; i < grid.size(); ++i)
    curve += fmt(grid[i], 2) + ":" + fmt(delays[i], 6) + " ";
  c.expect(monotone, "delay nondecreasing across the ratio grid: " + curve);

  std::vector<std::pair<double, double>> low;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] <= 0.5) low.emplace_back(grid[i], delays[i]);
  const auto line = metrics::fit_line(low);
  c.expect(line.r2 >= 0.9, "linear fit over ratio <= 0.5: R2 = " + fmt(line.r2));

  const double onset = (delays[6] / delays[5]) - (delays[4] / delays[3]);
  c.expect(onset > 0.0, "superlinear onset: d(0.9)/d(0.8) - d(0.5)/d(0.4) = " + fmt(onset));
}

// ---- criterion 9: delay scaling and throughput across n ----
void criterion_scaling(Ctx& c) {
  const std::vector<std::uint32_t> ns{49, 121, 225, 441};
  std::map<std::uint32_t, double> coded_delay, uncoded_delay, coded_thr;
  for (const auto n : ns) {
    auto cfg = base_config(n, 0);
    const auto coded = seeds_of(cfg, 5);
    coded_delay[n] = mean_delay(coded);
    coded_thr[n] = mean_throughput(coded);
    cfg.scheme = sim::Scheme::kUncoded;
    uncoded_delay[n] = mean_delay(seeds_of(cfg, 5));
  }
  for (const auto n : ns)
    c.expect(coded_delay[n] < uncoded_delay[n],
             "n=" + std::to_string(n) + ": coded " + fmt(coded_delay[n]) +
                 " < uncoded " + fmt(uncoded_delay[n]));

  std::vector<std::pair<double, double>> pts;
  for (const auto n : ns) pts.emplace_back(double(n), coded_delay[n]);
  const auto fit = metrics::fit_scaling(pts);
  c.expect(fit.prefers_linear, "model preference: linear R2 " + fmt(fit.r2_linear) +
                                   " vs nlogn R2 " + fmt(fit.r2_nlogn));
  c.expect(fit.r2_linear >= 0.95, "linear fit R2 " + fmt(fit.r2_linear) + " >= 0.95");
  const double ratio = coded_delay[441] / coded_delay[225];
  c.expect(ratio >= 1.5 && ratio <= 2.5,
           "delay(441)/delay(225) = " + fmt(ratio) + " in [1.5, 2.5]");

  for (const auto n : {225u, 441u}) {
    const double want = (1.0 / 9.0) * 0.5 * (1.0 / 9.0) * scheduler::p1(n);
    const double got = coded_thr[n];
    c.expect(std::abs(got - want) / want < 0.10,
             "throughput n=" + std::to_string(n) + ": " + fmt(got) + " vs " + fmt(want));
  }
  const double vary = std::abs(coded_thr[441] - coded_thr[225]) / coded_thr[225];
  c.expect(vary < 0.15, "throughput varies " + fmt(vary) + " < 15% between 225 and 441");
}

// ---- criterion 10: determinism ----
void criterion_determinism(Ctx& c) {
  const auto tmp = std::filesystem::temp_directory_path();
  for (const auto scheme : {sim::Scheme::kCoded, sim::Scheme::kUncoded}) {
    auto cfg = base_config(81, 909);
    cfg.scheme = scheme;
    cfg.horizon = 20000;
    cfg.warmup = 2000;
    std::string rows[2];
    std::string logs[2];
    for (int i = 0; i < 2; ++i) {
      const auto path = (tmp / ("accept_det_" + std::to_string(i) + ".log")).string();
      cfg.event_log_path = path;
      rows[i] = driver::summarize(sim::run(cfg)).to_csv();
      std::ifstream in(path, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      logs[i] = ss.str();
    }
    const std::string name = sim::scheme_name(scheme);
    c.expect(rows[0] == rows[1], name + ": CSV rows byte-identical");
    c.expect(!logs[0].empty() && logs[0] == logs[1], name + ": event logs byte-identical");
  }
}

// ---- criterion 11: mixing audit ----
void criterion_mixing(Ctx& c) {
  for (const int side : {3, 5, 7}) {
    const double n = static_cast<double>(side) * side;
    const auto p = mobility::transition_matrix(side);
    const auto res = mobility::mixing_time(p, 1.0 / (n * n));
    const double lo = (2.0 * std::log(n) - 1.0) / (n - 1.0);
    const double hi = 3.0 * std::log(n) / (1.0 - 1.0 / n);
    const bool inside = res.t >= lo && res.t <= hi;
    c.expect(true, "L=" + std::to_string(side) + ": measured T_mix " +
                       std::to_string(res.t) + ", claimed interval [" + fmt(lo) +
                       ", " + fmt(hi) + "]" +
                       (inside ? "" : "  ** OUTSIDE claimed interval (flagged) **"));
  }
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Ctx&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  bool list = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--list") == 0) list = true;
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
    }
  }

  const std::vector<Criterion> criteria{
      {1, "formula fidelity of the printed constants", criterion_constants},
      {2, "Reed-Solomon round-trips and minimum distance", criterion_rs},
      {3, "finite-field axioms, exhaustive for s <= 4", criterion_gf},
      {4, "inter-meeting statistics and doubly stochastic walks", criterion_mobility},
      {5, "per-slot scheduling rates", criterion_scheduling},
      {6, "version-spread probes (phi and eta)", criterion_probes},
      {7, "U-shaped delay in the source probability", criterion_u_shape},
      {8, "delay growth in the generation ratio", criterion_ratio_curve},
      {9, "delay scaling and flat throughput across n", criterion_scaling},
      {10, "byte-identical reruns", criterion_determinism},
      {11, "mixing-time audit against the claimed interval", criterion_mixing},
  };

  if (list) {
    for (const auto& cr : criteria) std::printf("%2d  %s\n", cr.id, cr.name);
    return 0;
  }

  int failures = 0;
  for (const auto& cr : criteria) {
    if (!only.empty() && only.count(cr.id) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Ctx ctx;
    cr.fn(ctx);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = ctx.all_ok();
    if (!ok) ++failures;
    std::printf("[%s] criterion %d: %s (%.1fs)\n", ok ? "PASS" : "FAIL", cr.id,
                cr.name, secs);
    for (const auto& chk : ctx.checks)
      std::printf("    %s %s\n", chk.ok ? "ok " : "BAD", chk.label.c_str());
    std::fflush(stdout);
  }
  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "PASS" : "FAIL", failures);
  return failures;
}
