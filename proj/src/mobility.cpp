#include "rsim/mobility.hpp"

#include <cmath>
#include <string>

namespace rsim::mobility {

namespace {

std::uint32_t step_cell(std::uint32_t cell, int side, std::uint32_t dir) {
  int i = static_cast<int>(cell) / side;
  int j = static_cast<int>(cell) % side;
  switch (dir) {
    case 0: i = (i + 1 == side) ? 0 : i + 1; break;
    case 1: i = (i == 0) ? side - 1 : i - 1; break;
    case 2: j = (j + 1 == side) ? 0 : j + 1; break;
    default: j = (j == 0) ? side - 1 : j - 1; break;
  }
  return static_cast<std::uint32_t>(i * side + j);
}

}  // namespace

Walkers make_walkers(int side, std::uint32_t count, std::uint64_t seed) {
  if (side < 1) throw std::invalid_argument("mobility: side must be >= 1");
  Walkers w;
  w.side = side;
  w.seed = seed;
  w.slot = 0;
  w.cells.resize(count);
  const std::uint64_t n_cells = static_cast<std::uint64_t>(side) * side;
  for (std::uint32_t k = 0; k < count; ++k) {
    rng::Stream st(seed, rng::Tag::kInit, k, 0);
    w.cells[k] = static_cast<std::uint32_t>(st.bounded(n_cells));
  }
  return w;
}

Walkers init_uniform(std::uint32_t node_count, std::uint64_t seed) {
  const auto side = static_cast<std::uint32_t>(std::lround(std::sqrt(double(node_count))));
  if (side * side != node_count)
    throw std::invalid_argument("mobility: node count " + std::to_string(node_count) +
                                " is not a perfect square");
  return make_walkers(static_cast<int>(side), node_count, seed);
}

void advance(Walkers& w) {
  const int side = w.side;
  const std::uint64_t seed = w.seed;
  const std::uint64_t slot = w.slot;
  const auto count = static_cast<std::int64_t>(w.cells.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < count; ++k) {
    const std::uint32_t dir = rng::uniform4(seed, rng::Tag::kMove, slot, static_cast<std::uint64_t>(k));
    w.cells[k] = step_cell(w.cells[k], side, dir);
  }
  ++w.slot;
}

void advance_serial(Walkers& w) {
  const int side = w.side;
  for (std::size_t k = 0; k < w.cells.size(); ++k) {
    const std::uint32_t dir = rng::uniform4(w.seed, rng::Tag::kMove, w.slot, k);
    w.cells[k] = step_cell(w.cells[k], side, dir);
  }
  ++w.slot;
}

MeetingStats meeting_stats(int side, std::uint64_t max_meetings, std::uint64_t seed) {
  if (side < 2) throw std::invalid_argument("mobility: meeting statistics need side >= 2");
  if (max_meetings == 0) throw std::invalid_argument("mobility: need at least one meeting");

  Walkers w = make_walkers(side, 2, rng::derive_key(seed, rng::Tag::kMeeting, side, 0));
  // On even sides the coordinate-sum parity of the difference walk is
  // invariant: walkers whose parities differ never share a cell, and the
  // chain restricted to the meeting-feasible class has n/2 states, so the
  // conditional mean return time is side^2 / 2 rather than side^2.
  // Shifting one coordinate maps the infeasible class bijectively onto the
  // feasible one, preserving uniformity of the conditioned start.
  if (side % 2 == 0) {
    const auto pa = w.cell_of(0), pb = w.cell_of(1);
    if ((pa.i + pa.j + pb.i + pb.j) % 2 != 0)
      w.cells[1] = static_cast<std::uint32_t>(pb.i * side + (pb.j + 1) % side);
  }
  const std::uint64_t no_meeting_cutoff =
      200ull * static_cast<std::uint64_t>(side) * side * static_cast<std::uint64_t>(side) * side;
  // Welford accumulation over gaps between co-location slots.
  std::uint64_t samples = 0;
  double mean = 0.0, m2 = 0.0;
  std::uint64_t last_meeting = 0;
  bool seen_first = false;
  while (samples < max_meetings) {
    if (w.slot - last_meeting > no_meeting_cutoff)
      throw std::runtime_error("mobility: no meeting within the safety cutoff");
    if (w.cells[0] == w.cells[1]) {
      if (seen_first) {
        const auto gap = static_cast<double>(w.slot - last_meeting);
        ++samples;
        const double d = gap - mean;
        mean += d / static_cast<double>(samples);
        m2 += d * (gap - mean);
      }
      last_meeting = w.slot;
      seen_first = true;
    }
    advance_serial(w);
  }
  MeetingStats out;
  out.samples = samples;
  out.mean = mean;
  out.variance = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
  return out;
}

Matrix transition_matrix(int side) {
  if (side < 1 || side > 32)
    throw std::invalid_argument("mobility: dense transition matrix limited to side <= 32");
  const std::size_t n = static_cast<std::size_t>(side) * side;
  Matrix p;
  p.n = n;
  p.a.assign(n * n, 0.0);
  for (std::uint32_t c = 0; c < n; ++c)
    for (std::uint32_t dir = 0; dir < 4; ++dir)
      p.at(c, step_cell(c, side, dir)) += 0.25;
  return p;
}

Matrix multiply_serial(const Matrix& x, const Matrix& y) {
  const std::size_t n = x.n;
  Matrix out;
  out.n = n;
  out.a.assign(n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const double v = x.at(r, k);
      if (v == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) out.at(r, c) += v * y.at(k, c);
    }
  return out;
}

Matrix multiply(const Matrix& x, const Matrix& y) {
  const std::size_t n = x.n;
  Matrix out;
  out.n = n;
  out.a.assign(n * n, 0.0);
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const double v = x.at(static_cast<std::size_t>(r), k);
      if (v == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c)
        out.at(static_cast<std::size_t>(r), c) += v * y.at(k, c);
    }
  return out;
}

namespace {

// Row deviations from uniform for one matrix power.
void row_deltas(const Matrix& pt, std::vector<double>& delta) {
  const std::size_t n = pt.n;
  const double uniform = 1.0 / static_cast<double>(n);
  delta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::abs(pt.at(i, j) - uniform);
    delta[i] = s;
  }
}

Matrix identity(std::size_t n) {
  Matrix m;
  m.n = n;
  m.a.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

}  // namespace

MixingProfile mixing_profile(const Matrix& p, int t_max) {
  if (t_max < 0) throw std::invalid_argument("mobility: t_max must be >= 0");
  MixingProfile prof;
  Matrix pt = identity(p.n);
  std::vector<double> delta;
  for (int t = 0; t <= t_max; ++t) {
    if (t > 0) pt = multiply(pt, p);
    row_deltas(pt, delta);
    double sup = 0.0;
    for (double d : delta) sup = std::max(sup, d);
    prof.delta.push_back(delta);
    prof.sup_delta.push_back(sup);
  }
  return prof;
}

MixingResult mixing_time(const Matrix& p, double eps, std::uint64_t cutoff) {
  const auto side = static_cast<int>(std::lround(std::sqrt(double(p.n))));
  if (static_cast<std::size_t>(side) * side != p.n)
    throw std::invalid_argument("mobility: matrix is not a torus transition matrix");
  if (side > 1 && side % 2 == 0)
    throw PeriodicChain("mobility: side " + std::to_string(side) +
                        " is even; the walk is periodic and never mixes");
  if (eps <= 0.0) throw std::invalid_argument("mobility: eps must be positive");

  // The deviation from uniform is non-increasing in t, so one step below
  // eps settles the "for all t' > t" quantifier; a confirmation window
  // guards against numerical surprises.
  constexpr int kConfirm = 32;
  Matrix pt = identity(p.n);
  std::vector<double> delta;
  std::uint64_t last_violation = 0;
  int confirmed = 0;
  for (std::uint64_t t = 1; t <= cutoff; ++t) {
    pt = multiply(pt, p);
    row_deltas(pt, delta);
    double sup = 0.0;
    for (double d : delta) sup = std::max(sup, d);
    if (sup > eps) {
      last_violation = t;
      confirmed = 0;
    } else if (++confirmed >= kConfirm) {
      return {last_violation, t};
    }
  }
  throw NotConverged("mobility: no convergence to eps=" + std::to_string(eps) +
                     " within " + std::to_string(cutoff) + " steps");
}

}  // namespace rsim::mobility
