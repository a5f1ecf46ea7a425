#include "rsim/scheduler.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rsim::scheduler {

namespace {

int ceil_tol(double x) {
  return static_cast<int>(std::ceil(x - 1e-9));
}

std::vector<std::uint32_t> lattice_cells(int side, const Lattice& lat, int per_axis) {
  std::vector<std::uint32_t> out;
  out.reserve(static_cast<std::size_t>(per_axis) * per_axis);
  for (int a = 0; a < per_axis; ++a)
    for (int b = 0; b < per_axis; ++b) {
      const int i = lat.off_i + a * lat.spacing;
      const int j = lat.off_j + b * lat.spacing;
      out.push_back(static_cast<std::uint32_t>(i * side + j));
    }
  return out;
}

}  // namespace

Lattice make_lattice(double delta) {
  if (!(delta >= 0.0))
    throw std::invalid_argument("scheduler: delta must be >= 0");
  Lattice lat;
  lat.delta = delta;
  lat.spacing = ceil_tol(std::numbers::sqrt2 * (1.0 + delta)) + 1;
  lat.theta_prime = 1.0 / (static_cast<double>(lat.spacing) * lat.spacing);
  return lat;
}

std::vector<std::uint32_t> active_cells(int side, const Lattice& lat) {
  if (side < 1) throw std::invalid_argument("scheduler: side must be >= 1");
  if (side % lat.spacing != 0)
    throw std::invalid_argument("scheduler: side " + std::to_string(side) +
                                " is not divisible by lattice spacing " +
                                std::to_string(lat.spacing));
  return lattice_cells(side, lat, side / lat.spacing);
}

std::vector<std::uint32_t> active_cells_ragged(int side, const Lattice& lat) {
  if (side < lat.spacing)
    throw std::invalid_argument("scheduler: side " + std::to_string(side) +
                                " is smaller than lattice spacing " +
                                std::to_string(lat.spacing));
  return lattice_cells(side, lat, side / lat.spacing);
}

void Occupancy::build(std::span<const std::uint32_t> cell_of_node, std::uint32_t n_cells) {
  start.assign(n_cells + 1, 0);
  node.resize(cell_of_node.size());
  for (const auto c : cell_of_node) ++start[c + 1];
  for (std::uint32_t c = 0; c < n_cells; ++c) start[c + 1] += start[c];
  std::vector<std::uint32_t> cursor(start.begin(), start.end() - 1);
  for (std::uint32_t v = 0; v < cell_of_node.size(); ++v)
    node[cursor[cell_of_node[v]]++] = v;
}

SlotSchedule select_transmissions(const Occupancy& occ,
                                  std::span<const std::uint32_t> active,
                                  double p_s, std::uint64_t seed,
                                  std::uint64_t slot) {
  SlotSchedule sched;
  for (const auto cell : active) {
    const auto occupants = occ.of(cell);
    const auto count = static_cast<std::uint32_t>(occupants.size());
    if (count < 2) continue;
    rng::Stream st(seed, rng::Tag::kSchedule, slot, cell);
    const auto s_idx = static_cast<std::uint32_t>(st.bounded(count));
    auto r_idx = static_cast<std::uint32_t>(st.bounded(count - 1));
    if (r_idx >= s_idx) ++r_idx;
    Assignment a;
    a.cell = cell;
    a.sender = occupants[s_idx];
    a.receiver = occupants[r_idx];
    a.source_role = st.coin(p_s);
    sched.assignments.push_back(a);
  }
  return sched;
}

bool validate_protocol_model(const SlotSchedule& sched, int side, double delta,
                             std::uint32_t trials, std::uint64_t seed) {
  const double d = 1.0 / side;  // cell edge on the unit torus
  const auto k = sched.assignments.size();
  if (k < 2) return true;  // a lone transmission has no interferer

  auto torus_dist = [&](double ax, double ay, double bx, double by) {
    double dx = std::abs(ax - bx);
    double dy = std::abs(ay - by);
    if (dx > 0.5) dx = 1.0 - dx;
    if (dy > 0.5) dy = 1.0 - dy;
    return std::hypot(dx, dy);
  };

  rng::Stream st(seed, rng::Tag::kSchedule, 0xfeed, 0);
  std::vector<double> sx(k), sy(k), rx(k), ry(k);
  for (std::uint32_t trial = 0; trial < trials; ++trial) {
    for (std::size_t t = 0; t < k; ++t) {
      const auto cell = sched.assignments[t].cell;
      const double ci = static_cast<double>(cell / static_cast<std::uint32_t>(side));
      const double cj = static_cast<double>(cell % static_cast<std::uint32_t>(side));
      sx[t] = (ci + st.unit()) * d;
      sy[t] = (cj + st.unit()) * d;
      rx[t] = (ci + st.unit()) * d;
      ry[t] = (cj + st.unit()) * d;
    }
    for (std::size_t t = 0; t < k; ++t) {
      const double link = torus_dist(sx[t], sy[t], rx[t], ry[t]);
      for (std::size_t o = 0; o < k; ++o) {
        if (o == t) continue;
        const double interferer = torus_dist(sx[o], sy[o], rx[t], ry[t]);
        if (interferer < (1.0 + delta) * link) return false;
      }
    }
  }
  return true;
}

double p1(std::uint32_t n) {
  if (n < 2) throw std::invalid_argument("scheduler: p1 needs n >= 2");
  const double r = 1.0 - 1.0 / static_cast<double>(n);
  return 1.0 - std::pow(r, static_cast<double>(n)) -
         std::pow(r, static_cast<double>(n - 1));
}

double expected_theta(std::uint32_t n, double delta) {
  return make_lattice(delta).theta_prime * p1(n);
}

double theta0(double delta) {
  return make_lattice(delta).theta_prime * (1.0 - 2.0 / std::numbers::e);
}

double p2(std::uint32_t n, double p_s, double delta) {
  if (n < 3) throw std::invalid_argument("scheduler: p2 needs n >= 3");
  if (!(p_s > 0.0 && p_s <= 1.0))
    throw std::invalid_argument("scheduler: p_s must be in (0, 1]");
  const double nn = static_cast<double>(n);
  return make_lattice(delta).theta_prime * (1.0 - p_s) * ((nn - 2.0) / (nn - 1.0)) *
         p1(n);
}

double p2_limit(double p_s, double delta) {
  return make_lattice(delta).theta_prime * (1.0 - p_s) *
         (1.0 - 2.0 / std::numbers::e);
}

double t_s(std::uint32_t n, double p_s, double delta) {
  if (!(p_s > 0.0 && p_s <= 1.0))
    throw std::invalid_argument("scheduler: p_s must be in (0, 1]");
  return static_cast<double>(n) / (p_s * make_lattice(delta).theta_prime * p1(n));
}

C1Window c1_window(double p_s, double delta, double c0) {
  if (!(c0 > 0.0)) throw std::invalid_argument("scheduler: c0 must be positive");
  C1Window w;
  w.lo = (c0 + 1.0) / (std::numbers::e * std::numbers::ln2);
  w.hi = 1.0 / (make_lattice(delta).theta_prime * p_s);
  return w;
}

namespace {

double bound_from(double p_s, double t0, double p2l, double ratio) {
  return (p_s * t0 / (1.0 + t0 * p_s)) * (p2l * ratio);
}

double round4(double x) { return std::round(x * 1e4) / 1e4; }

}  // namespace

double delta_bound(double p_s, double delta, double c1, double c0) {
  const C1Window w = c1_window(p_s, delta, c0);
  if (!(c1 > w.lo && c1 < w.hi))
    throw std::domain_error("scheduler: c1=" + std::to_string(c1) +
                            " outside the admissible window (" +
                            std::to_string(w.lo) + ", " + std::to_string(w.hi) + ")");
  return bound_from(p_s, theta0(delta), p2_limit(p_s, delta), c1 / (c1 + 1.0));
}

DeltaBoundWindow delta_bound_window(double p_s, double delta, double c0) {
  const C1Window w = c1_window(p_s, delta, c0);
  DeltaBoundWindow out;
  out.at_c1_lo = bound_from(p_s, theta0(delta), p2_limit(p_s, delta), w.lo / (w.lo + 1.0));
  out.at_c1_hi = bound_from(p_s, theta0(delta), p2_limit(p_s, delta), w.hi / (w.hi + 1.0));
  return out;
}

DeltaBoundWindow delta_bound_window_4dp(double p_s, double delta, double c0) {
  const C1Window w = c1_window(p_s, delta, c0);
  const double t0 = round4(theta0(delta));
  const double p2l = round4(p2_limit(p_s, delta));
  DeltaBoundWindow out;
  out.at_c1_lo = bound_from(p_s, t0, p2l, round4(w.lo / (w.lo + 1.0)));
  out.at_c1_hi = bound_from(p_s, t0, p2l, round4(w.hi / (w.hi + 1.0)));
  return out;
}

}  // namespace rsim::scheduler
