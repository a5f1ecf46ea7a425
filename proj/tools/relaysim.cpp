// relaysim -- experiment driver for the coded two-hop relay simulator.
//
// Subcommands: constants | run | sweep | selftest | probes | mixing |
// mobility-stats.  See README.md for the CSV schemas and examples.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsim/driver.hpp"
#include "rsim/metrics.hpp"
#include "rsim/mobility.hpp"
#include "rsim/scheduler.hpp"
#include "rsim/selfcheck.hpp"
#include "rsim/sim.hpp"

namespace {

using rsim::driver::fmt_double;
using rsim::driver::fmt_general;

std::string now_string() {
  char buf[32];
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct WindowFlags {
  std::uint64_t horizon = 0;  // 0 = use multiplier
  std::uint64_t warmup = 0;
  bool warmup_set = false;
  double horizon_mult = 400.0;
  double warmup_mult = 40.0;

  void apply(rsim::sim::Config& cfg) const {
    cfg.horizon = horizon != 0
                      ? horizon
                      : static_cast<std::uint64_t>(std::llround(horizon_mult * cfg.n));
    cfg.warmup = warmup_set || warmup != 0
                     ? warmup
                     : static_cast<std::uint64_t>(std::llround(warmup_mult * cfg.n));
  }
};

void add_window_flags(CLI::App* cmd, WindowFlags& w) {
  cmd->add_option("--horizon", w.horizon, "Total slots (overrides --horizon-mult)");
  cmd->add_option("--warmup", w.warmup, "Warm-up slots excluded from metrics")
      ->each([&w](const std::string&) { w.warmup_set = true; });
  cmd->add_option("--horizon-mult", w.horizon_mult,
                  "Horizon as a multiple of n (default 400)");
  cmd->add_option("--warmup-mult", w.warmup_mult,
                  "Warm-up as a multiple of n (default 40)");
}

std::string g_config_path;  // consumed during preprocessing; option kept for --help

void add_config_file(CLI::App* cmd) {
  cmd->add_option("--config", g_config_path,
                  "Config file with flat key=value lines (flags override)");
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Reads --config FILE ourselves and injects "--key=value" tokens for keys
// the command line does not already carry, so explicit flags override the
// file.  Lines starting with '#' and blank lines are skipped.
std::vector<std::string> with_config_defaults(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  const auto given = [&args](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> inject;
  std::string line;
  while (std::getline(in, line)) {
    line = trimmed(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line without '=': " + line);
    const std::string key = trimmed(line.substr(0, eq));
    const std::string value = trimmed(line.substr(eq + 1));
    if (!given("--" + key)) inject.push_back("--" + key + "=" + value);
  }
  // insert right after the subcommand token
  auto pos = args.begin();
  while (pos != args.end() && pos->rfind('-', 0) == 0) ++pos;
  if (pos != args.end()) ++pos;
  args.insert(pos, inject.begin(), inject.end());
  return args;
}

int cmd_constants(std::uint32_t n, double p_s, double delta, double c0,
                  double c1, bool c1_given) {
  namespace sched = rsim::scheduler;
  const auto lat = sched::make_lattice(delta);
  const auto window = sched::c1_window(p_s, delta, c0);
  const auto full = sched::delta_bound_window(p_s, delta, c0);
  const auto quoted = sched::delta_bound_window_4dp(p_s, delta, c0);
  std::printf("n                    %u\n", n);
  std::printf("p_s                  %s\n", fmt_double(p_s, 4).c_str());
  std::printf("delta                %s\n", fmt_double(delta, 8).c_str());
  std::printf("spacing k            %d\n", lat.spacing);
  std::printf("theta_prime          %s (1/%d^2)\n",
              fmt_double(lat.theta_prime, 8).c_str(), lat.spacing);
  std::printf("p1(n)                %s\n", fmt_double(sched::p1(n), 8).c_str());
  std::printf("E[theta(n)]          %s\n",
              fmt_double(sched::expected_theta(n, delta), 8).c_str());
  std::printf("theta0               %s (rounds to %s)\n",
              fmt_double(sched::theta0(delta), 8).c_str(),
              fmt_double(sched::theta0(delta), 4).c_str());
  std::printf("p2(n)                %s\n",
              fmt_double(sched::p2(n, p_s, delta), 8).c_str());
  std::printf("p2 limit             %s (rounds to %s)\n",
              fmt_double(sched::p2_limit(p_s, delta), 8).c_str(),
              fmt_double(sched::p2_limit(p_s, delta), 4).c_str());
  std::printf("t_s(n) slots         %s\n",
              fmt_double(sched::t_s(n, p_s, delta), 2).c_str());
  std::printf("c1 window            (%s, %s)\n", fmt_double(window.lo, 4).c_str(),
              fmt_double(window.hi, 4).c_str());
  std::printf("delta bound at c1lo  %.4e   (4dp convention %.4e)\n", full.at_c1_lo,
              quoted.at_c1_lo);
  std::printf("delta bound at c1hi  %.4e   (4dp convention %.4e)\n", full.at_c1_hi,
              quoted.at_c1_hi);
  if (c1_given) {
    try {
      const double b = sched::delta_bound(p_s, delta, c1, c0);
      std::printf("delta bound at c1=%s  %.4e\n", fmt_double(c1, 4).c_str(), b);
    } catch (const std::domain_error& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    }
  }
  return 0;
}

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos < list.size()) {
    const auto comma = list.find(',', pos);
    const auto tok = list.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (seeds.empty()) throw CLI::ValidationError("--seeds", "empty seed list");
  return seeds;
}

int finish_runs(const std::vector<rsim::driver::RunRow>& rows,
                rsim::driver::Manifest& manifest, const std::string& out,
                const std::string& started, bool force) {
  std::string csv = rsim::driver::RunRow::csv_header() + "\n";
  std::uint32_t unstable = 0;
  for (const auto& row : rows) {
    csv += row.to_csv() + "\n";
    if (row.unstable) ++unstable;
  }
  rsim::driver::write_file(out, csv, force);
  manifest.add("started", started);
  manifest.add("finished", now_string());
  manifest.add("unstable_runs", static_cast<std::uint64_t>(unstable));
  manifest.add("rows", static_cast<std::uint64_t>(rows.size()));
  manifest.add("csv", out);
  rsim::driver::write_file(out + ".manifest", manifest.text(), force);
  if (unstable == rows.size()) {
    std::fprintf(stderr, "warning: every seed flagged unstable\n");
    return 3;
  }
  return 0;
}

void describe_config(rsim::driver::Manifest& m, const rsim::sim::Config& cfg) {
  m.add("artifact_version", rsim::driver::kArtifactVersion);
  m.add("scheme", rsim::sim::scheme_name(cfg.scheme));
  m.add("n", static_cast<std::uint64_t>(cfg.n));
  m.add("delta", cfg.delta);
  m.add("p_s", cfg.p_s);
  m.add("delta_ratio", cfg.delta_ratio);
  m.add("horizon", cfg.horizon);
  m.add("warmup", cfg.warmup);
  m.add("c0", cfg.c0);
  m.add("strict_hol", std::string(cfg.strict_hol ? "1" : "0"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-time simulator for coded and uncoded two-hop relay "
               "schemes on a torus random walk"};
  app.set_version_flag("--version", rsim::driver::kArtifactVersion);
  app.require_subcommand(1);

  // ---- constants ----
  std::uint32_t c_n = 225;
  double c_ps = 0.5, c_delta = std::numbers::sqrt2 - 1.0, c_c0 = 3.0, c_c1 = 0.0;
  auto* constants = app.add_subcommand("constants", "Print scheduling rates and protocol constants");
  constants->add_option("--n", c_n, "Node count");
  constants->add_option("--ps", c_ps, "Source-role probability");
  constants->add_option("--delta", c_delta, "Protocol-model guard parameter");
  constants->add_option("--c0", c_c0, "Mixing-interval constant");
  auto* c1_opt = constants->add_option("--c1", c_c1, "Evaluate the generation-ratio bound at this c1");

  // ---- run ----
  rsim::sim::Config base;
  std::string r_scheme = "2hrrsc", r_seeds = "1", r_out, r_event_log;
  WindowFlags r_window;
  bool r_force = false;
  int r_workers = 0;
  auto* runc = app.add_subcommand("run", "Simulate one configuration over one or more seeds");
  add_config_file(runc);
  runc->add_option("--scheme", r_scheme, "2hrrsc or 2hop");
  runc->add_option("--n", base.n, "Node count (perfect square)");
  runc->add_option("--ps", base.p_s, "Source-role probability");
  runc->add_option("--delta", base.delta, "Protocol-model guard parameter");
  runc->add_option("--delta-ratio", base.delta_ratio, "Generation ratio (m = round(ratio * n))");
  runc->add_option("--c0", base.c0, "Mixing-interval constant");
  runc->add_flag("--strict-hol", base.strict_hol,
                 "Relay offers only the head of the earliest undecoded generation");
  runc->add_option("--seeds", r_seeds, "Comma-separated seed list");
  runc->add_option("--event-log", r_event_log, "Write a transmission event log here (single seed only)");
  runc->add_option("--out", r_out, "Output CSV path")->required();
  runc->add_flag("--force", r_force, "Overwrite existing outputs");
  runc->add_option("--workers", r_workers, "Parallel runs (0 = all cores)")
      ->envname("RELAYSIM_WORKERS");
  add_window_flags(runc, r_window);

  // ---- sweep ----
  std::string s_param = "ps", s_out, s_runs_out, s_scheme = "2hrrsc";
  std::vector<double> s_values;
  std::uint32_t s_seeds_per_point = 5;
  std::uint64_t s_seed_base = 1;
  bool s_fig5 = false, s_fig6 = false, s_fig7 = false, s_force = false;
  int s_workers = 0;
  rsim::sim::Config s_base;
  WindowFlags s_window;
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter over a value grid");
  add_config_file(sweep);
  sweep->add_option("--param", s_param, "Swept parameter: ps | delta-ratio | n");
  sweep->add_option("--values", s_values, "Value grid (comma separated)")->delimiter(',');
  sweep->add_flag("--fig5", s_fig5, "Preset: p_s grid 0.1..0.9 at fixed n");
  sweep->add_flag("--fig6", s_fig6, "Preset: delta-ratio grid at fixed n");
  sweep->add_flag("--fig7", s_fig7, "Preset: n grid {49,121,225,441}, both schemes");
  sweep->add_option("--scheme", s_scheme, "2hrrsc or 2hop");
  sweep->add_option("--n", s_base.n, "Node count (fixed unless swept)");
  sweep->add_option("--ps", s_base.p_s, "Source-role probability");
  sweep->add_option("--delta", s_base.delta, "Protocol-model guard parameter");
  sweep->add_option("--delta-ratio", s_base.delta_ratio, "Generation ratio");
  sweep->add_option("--c0", s_base.c0, "Mixing-interval constant");
  sweep->add_flag("--strict-hol", s_base.strict_hol, "Strict head-of-line relay rule");
  sweep->add_option("--seeds-per-point", s_seeds_per_point, "Seeds per sweep point");
  sweep->add_option("--seed-base", s_seed_base, "First seed value");
  sweep->add_option("--out", s_out, "Aggregate CSV path")->required();
  sweep->add_option("--runs-out", s_runs_out, "Optional per-run CSV path");
  sweep->add_flag("--force", s_force, "Overwrite existing outputs");
  sweep->add_option("--workers", s_workers, "Parallel runs (0 = all cores)")
      ->envname("RELAYSIM_WORKERS");
  add_window_flags(sweep, s_window);

  // ---- selftest ----
  auto* selftest = app.add_subcommand("selftest", "Run the built-in verification suites");

  // ---- probes ----
  rsim::sim::Config p_base;
  std::string p_out;
  std::uint32_t p_samples = 120;
  bool p_force = false;
  WindowFlags p_window;
  auto* probes = app.add_subcommand("probes", "Sample version-spread statistics of tagged generations");
  add_config_file(probes);
  probes->add_option("--n", p_base.n, "Node count");
  probes->add_option("--ps", p_base.p_s, "Source-role probability");
  probes->add_option("--delta", p_base.delta, "Protocol-model guard parameter");
  probes->add_option("--delta-ratio", p_base.delta_ratio, "Generation ratio");
  probes->add_option("--c0", p_base.c0, "Mixing-interval constant");
  probes->add_option("--samples", p_samples, "Tagged generations");
  probes->add_option("--eta-window", p_base.probe_eta_window, "Sender-sampling window (slots)");
  probes->add_option("--seed", p_base.seed, "Seed");
  probes->add_option("--out", p_out, "Output CSV path")->required();
  probes->add_flag("--force", p_force, "Overwrite existing outputs");
  add_window_flags(probes, p_window);

  // ---- mixing ----
  std::vector<int> m_sides{3, 5, 7};
  double m_eps = 0.0;
  std::uint64_t m_cutoff = 50000;
  std::string m_profile_out;
  bool m_force = false;
  auto* mixing = app.add_subcommand("mixing", "Exact mixing-time audit of the torus walk");
  mixing->add_option("--sides", m_sides, "Grid sides, comma separated (odd)")->delimiter(',');
  mixing->add_option("--eps", m_eps, "Mixing threshold (default 1/n^2 per side)");
  mixing->add_option("--cutoff", m_cutoff, "Power-iteration cutoff");
  mixing->add_option("--profile-out", m_profile_out, "Optional CSV of side,t,sup_delta");
  mixing->add_flag("--force", m_force, "Overwrite existing outputs");

  // ---- mobility-stats ----
  int w_side = 15;
  std::uint64_t w_meetings = 100000, w_seed = 1;
  auto* mob = app.add_subcommand("mobility-stats", "Inter-meeting time statistics of two walkers");
  mob->add_option("--side", w_side, "Grid side L (cells = L^2)");
  mob->add_option("--meetings", w_meetings, "Meetings to sample");
  mob->add_option("--seed", w_seed, "Seed");

  std::vector<std::string> args;
  try {
    args = with_config_defaults(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::reverse(args.begin(), args.end());  // CLI11's vector parse order
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (constants->parsed())
      return cmd_constants(c_n, c_ps, c_delta, c_c0, c_c1, c1_opt->count() > 0);

    if (runc->parsed()) {
      base.scheme = rsim::sim::parse_scheme(r_scheme);
      if (base.delta < 0.0) base.delta = std::numbers::sqrt2 - 1.0;
      if (base.delta_ratio == 0.0) base.delta_ratio = 1.0 / 9.0;
      r_window.apply(base);
      const auto seeds = parse_seeds(r_seeds);
      if (!r_event_log.empty() && seeds.size() > 1)
        throw std::runtime_error("--event-log supports a single seed");
      if (!r_event_log.empty() && !r_force && std::filesystem::exists(r_event_log))
        throw std::runtime_error("refusing to overwrite existing file " + r_event_log +
                                 " (use --force)");
      const auto started = now_string();
      std::vector<rsim::sim::Config> configs;
      for (const auto seed : seeds) {
        auto cfg = base;
        cfg.seed = seed;
        cfg.event_log_path = r_event_log;
        configs.push_back(cfg);
      }
      const auto rows = rsim::driver::run_many(configs, r_workers);
      rsim::driver::Manifest manifest;
      describe_config(manifest, base);
      manifest.add("seeds", r_seeds);
      if (!r_event_log.empty()) manifest.add("event_log", r_event_log);
      return finish_runs(rows, manifest, r_out, started, r_force);
    }

    if (sweep->parsed()) {
      if (s_base.delta < 0.0) s_base.delta = std::numbers::sqrt2 - 1.0;
      if (s_base.delta_ratio == 0.0) s_base.delta_ratio = 1.0 / 9.0;
      if (s_fig5 + s_fig6 + s_fig7 > 1)
        throw std::runtime_error("choose at most one preset");
      std::vector<std::string> schemes{s_scheme};
      if (s_fig5) {
        s_param = "ps";
        s_values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
      } else if (s_fig6) {
        s_param = "delta-ratio";
        s_values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.8, 0.9};
      } else if (s_fig7) {
        s_param = "n";
        s_values = {49, 121, 225, 441};
        schemes = {"2hrrsc", "2hop"};
      }
      if (s_values.empty()) throw std::runtime_error("empty sweep value list");
      if (s_param != "ps" && s_param != "delta-ratio" && s_param != "n")
        throw std::runtime_error("unknown sweep parameter '" + s_param + "'");

      const auto started = now_string();
      struct Point {
        std::string scheme;
        double value;
        std::size_t first_row;
      };
      std::vector<Point> points;
      std::vector<rsim::sim::Config> configs;
      for (const auto& scheme : schemes)
        for (const auto value : s_values) {
          points.push_back({scheme, value, configs.size()});
          for (std::uint32_t k = 0; k < s_seeds_per_point; ++k) {
            auto cfg = s_base;
            cfg.scheme = rsim::sim::parse_scheme(scheme);
            if (s_param == "ps") cfg.p_s = value;
            if (s_param == "delta-ratio") cfg.delta_ratio = value;
            if (s_param == "n") cfg.n = static_cast<std::uint32_t>(std::llround(value));
            cfg.seed = s_seed_base + k;
            s_window.apply(cfg);
            configs.push_back(cfg);
          }
        }
      const auto rows = rsim::driver::run_many(configs, s_workers);

      std::string agg_csv = rsim::driver::PointAggregate::csv_header() + "\n";
      std::vector<rsim::driver::PointAggregate> aggs;
      for (const auto& pt : points) {
        const std::span<const rsim::driver::RunRow> span{rows.data() + pt.first_row,
                                                         s_seeds_per_point};
        auto agg = rsim::driver::aggregate(s_param, pt.value, span);
        agg_csv += agg.to_csv() + "\n";
        aggs.push_back(agg);
      }
      rsim::driver::write_file(s_out, agg_csv, s_force);
      if (!s_runs_out.empty()) {
        std::string csv = rsim::driver::RunRow::csv_header() + "\n";
        for (const auto& row : rows) csv += row.to_csv() + "\n";
        rsim::driver::write_file(s_runs_out, csv, s_force);
      }

      rsim::driver::Manifest manifest;
      describe_config(manifest, s_base);
      if (s_window.horizon != 0)
        manifest.add("horizon_policy", s_window.horizon);
      else
        manifest.add("horizon_policy", fmt_general(s_window.horizon_mult) + "*n");
      if (s_window.warmup_set || s_window.warmup != 0)
        manifest.add("warmup_policy", s_window.warmup);
      else
        manifest.add("warmup_policy", fmt_general(s_window.warmup_mult) + "*n");
      manifest.add("sweep_param", s_param);
      manifest.add("seeds_per_point", static_cast<std::uint64_t>(s_seeds_per_point));
      manifest.add("seed_base", s_seed_base);
      manifest.add("started", started);
      manifest.add("finished", now_string());
      std::uint32_t unstable = 0;
      for (const auto& row : rows)
        if (row.unstable) ++unstable;
      manifest.add("unstable_runs", static_cast<std::uint64_t>(unstable));

      if (s_param == "n") {
        // scaling summary over the coded aggregates
        std::vector<std::pair<double, double>> pts;
        for (const auto& agg : aggs)
          if (agg.scheme == "2hrrsc" && !std::isnan(agg.mean_delay))
            pts.emplace_back(static_cast<double>(agg.n), agg.mean_delay);
        if (pts.size() >= 3) {
          const auto fit = rsim::metrics::fit_scaling(pts);
          std::printf("scaling fit over %zu points:\n", pts.size());
          std::printf("  D = a*n       a=%s  R2=%s\n", fmt_general(fit.coef_linear).c_str(),
                      fmt_double(fit.r2_linear, 6).c_str());
          std::printf("  D = a*n*ln n  a=%s  R2=%s\n", fmt_general(fit.coef_nlogn).c_str(),
                      fmt_double(fit.r2_nlogn, 6).c_str());
          std::printf("  preferred: %s\n", fit.prefers_linear ? "a*n" : "a*n*ln n");
          manifest.add("fit_linear_coef", fit.coef_linear);
          manifest.add("fit_linear_r2", fit.r2_linear);
          manifest.add("fit_nlogn_coef", fit.coef_nlogn);
          manifest.add("fit_nlogn_r2", fit.r2_nlogn);
          manifest.add("fit_preferred", std::string(fit.prefers_linear ? "n" : "nlogn"));
        }
      }
      rsim::driver::write_file(s_out + ".manifest", manifest.text(), s_force);
      if (unstable == rows.size()) {
        std::fprintf(stderr, "warning: every run flagged unstable\n");
        return 3;
      }
      return 0;
    }

    if (selftest->parsed()) {
      const auto suites = rsim::selfcheck::run_all();
      bool ok = true;
      for (const auto& suite : suites) {
        std::printf("%-18s %8llu checks  %llu failures\n", suite.name.c_str(),
                    static_cast<unsigned long long>(suite.checks),
                    static_cast<unsigned long long>(suite.failures));
        for (const auto& note : suite.notes)
          std::printf("    %s\n", note.c_str());
        ok = ok && suite.ok();
      }
      std::printf("%s\n", ok ? "selftest: PASS" : "selftest: FAIL");
      return ok ? 0 : 1;
    }

    if (probes->parsed()) {
      if (p_base.delta < 0.0) p_base.delta = std::numbers::sqrt2 - 1.0;
      if (p_base.delta_ratio == 0.0) p_base.delta_ratio = 1.0 / 9.0;
      p_base.scheme = rsim::sim::Scheme::kCoded;
      p_base.probe_samples = p_samples;
      p_window.apply(p_base);
      const auto started = now_string();
      const auto result = rsim::sim::run(p_base);
      std::string csv =
          "pair,gen,t1,M,phi,eta,m_excl_dest,eta_observations,"
          "decoded_before_probe,decoded_before_eta\n";
      for (const auto& s : result.probes) {
        csv += std::to_string(s.pair) + ',' + std::to_string(s.gen) + ',' +
               std::to_string(s.t1) + ',' + std::to_string(s.holders_with_dest) + ',' +
               fmt_double(s.phi, 6) + ',' + fmt_double(s.eta, 6) + ',' +
               std::to_string(s.holders_excl_dest) + ',' +
               std::to_string(s.eta_observations) + ',' +
               (s.decoded_before_probe ? "1" : "0") + ',' +
               (s.decoded_before_eta_end ? "1" : "0") + "\n";
      }
      rsim::driver::write_file(p_out, csv, p_force);
      rsim::driver::Manifest manifest;
      describe_config(manifest, p_base);
      manifest.add("samples_requested", static_cast<std::uint64_t>(p_samples));
      manifest.add("samples_collected", static_cast<std::uint64_t>(result.probes.size()));
      manifest.add("samples_skipped", static_cast<std::uint64_t>(result.probes_skipped));
      manifest.add("seed", p_base.seed);
      manifest.add("started", started);
      manifest.add("finished", now_string());
      rsim::driver::write_file(p_out + ".manifest", manifest.text(), p_force);
      double phi_sum = 0.0;
      for (const auto& s : result.probes) phi_sum += s.phi;
      if (!result.probes.empty())
        std::printf("samples %zu  mean phi %s  skipped %u\n", result.probes.size(),
                    fmt_double(phi_sum / result.probes.size(), 6).c_str(),
                    result.probes_skipped);
      return 0;
    }

    if (mixing->parsed()) {
      std::string profile_csv = "side,t,sup_delta\n";
      std::printf("%4s %6s %12s %12s %12s %12s  %s\n", "L", "n", "eps", "t_mix",
                  "claimed_lo", "claimed_hi", "agreement");
      for (const int side : m_sides) {
        const double n = static_cast<double>(side) * side;
        const double eps = m_eps > 0.0 ? m_eps : 1.0 / (n * n);
        const auto p = rsim::mobility::transition_matrix(side);
        const auto res = rsim::mobility::mixing_time(p, eps, m_cutoff);
        const double lo = (2.0 * std::log(n) - 1.0) / (n - 1.0);
        const double hi = 3.0 * std::log(n) / (1.0 - 1.0 / n);
        const bool inside = static_cast<double>(res.t) >= lo &&
                            static_cast<double>(res.t) <= hi;
        std::printf("%4d %6.0f %12.3e %12llu %12.4f %12.4f  %s\n", side, n, eps,
                    static_cast<unsigned long long>(res.t), lo, hi,
                    inside ? "within" : "OUTSIDE claimed interval (flagged)");
        if (!m_profile_out.empty()) {
          const auto prof = rsim::mobility::mixing_profile(
              p, static_cast<int>(res.t) + 8);
          for (std::size_t t = 0; t < prof.sup_delta.size(); ++t)
            profile_csv += std::to_string(side) + ',' + std::to_string(t) + ',' +
                           fmt_general(prof.sup_delta[t]) + "\n";
        }
      }
      if (!m_profile_out.empty())
        rsim::driver::write_file(m_profile_out, profile_csv, m_force);
      return 0;
    }

    if (mob->parsed()) {
      const auto stats = rsim::mobility::meeting_stats(w_side, w_meetings, w_seed);
      const double n = static_cast<double>(w_side) * w_side;
      std::printf("side %d  cells %0.f\n", w_side, n);
      std::printf("meetings  %llu\n", static_cast<unsigned long long>(stats.samples));
      std::printf("mean      %s (exact stationary mean %0.f, rel err %s)\n",
                  fmt_double(stats.mean, 4).c_str(), n,
                  fmt_double(std::abs(stats.mean - n) / n, 6).c_str());
      std::printf("variance  %s\n", fmt_double(stats.variance, 4).c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
