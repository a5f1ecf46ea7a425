#pragma once
// Random-walk mobility on the L x L torus cell grid: walker state,
// inter-meeting statistics, and exact mixing analysis of the single-walker
// transition matrix.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rsim/rng.hpp"

namespace rsim::mobility {

struct Cell {
  int i = 0;
  int j = 0;
};

// A set of independent walkers on one torus.  The random stream is keyed
// by (seed, slot, walker), so a trajectory is a pure function of the seed
// and advancing all walkers is safe to parallelize.
struct Walkers {
  int side = 0;                      // L
  std::uint64_t seed = 0;
  std::uint64_t slot = 0;            // stream position
  std::vector<std::uint32_t> cells;  // flat index i * L + j per walker

  Cell cell_of(std::uint32_t w) const {
    const auto c = cells[w];
    return {static_cast<int>(c / side), static_cast<int>(c % side)};
  }
};

// count walkers, each uniform over the side^2 cells.
Walkers make_walkers(int side, std::uint32_t count, std::uint64_t seed);

// node_count walkers on the sqrt(node_count) torus (one cell per node on
// average); node_count must be a perfect square.
Walkers init_uniform(std::uint32_t node_count, std::uint64_t seed);

// Move every walker to one of its four torus neighbors, probability 1/4
// each, and advance the stream position.  advance() parallelizes over
// walkers with OpenMP; advance_serial() is the reference implementation
// and produces bit-identical state.
void advance(Walkers& w);
void advance_serial(Walkers& w);

struct MeetingStats {
  std::uint64_t samples = 0;
  double mean = 0.0;      // slots between co-locations
  double variance = 0.0;  // unbiased sample variance
};

// Two independent walkers; gaps between successive slots in which they
// share a cell.  side >= 2 required.  On odd sides the mean gap is side^2
// (uniform return time of the doubly stochastic difference walk).  Even
// sides split into parity classes: pairs in opposite classes never meet,
// so the start is conditioned on the meeting-feasible class, whose mean
// return time is side^2 / 2.
MeetingStats meeting_stats(int side, std::uint64_t max_meetings, std::uint64_t seed);

struct Matrix {
  std::size_t n = 0;
  std::vector<double> a;  // row-major n x n

  double& at(std::size_t r, std::size_t c) { return a[r * n + c]; }
  double at(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};

// Single-walker transition matrix on the side^2 cells; side <= 32 (dense
// representation only at small scale).
Matrix transition_matrix(int side);

// OpenMP matrix product and its serial reference; identical element order
// of accumulation, so results are bit-identical.
Matrix multiply(const Matrix& x, const Matrix& y);
Matrix multiply_serial(const Matrix& x, const Matrix& y);

struct MixingProfile {
  // delta[t][i] = sum_j |P^t(i,j) - 1/n| for t = 0 .. t_max.
  std::vector<std::vector<double>> delta;
  std::vector<double> sup_delta;  // max over i, per t
};

MixingProfile mixing_profile(const Matrix& p, int t_max);

struct PeriodicChain : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MixingResult {
  std::uint64_t t = 0;              // smallest t with Delta_i(t') <= eps for all i, t' > t
  std::uint64_t steps_checked = 0;  // powers examined
};

// Exact eps-mixing time via matrix powers.  Requires odd side (even sides
// make the walk periodic and are rejected with PeriodicChain); raises
// NotConverged when the cutoff is hit first.
MixingResult mixing_time(const Matrix& p, double eps, std::uint64_t cutoff = 50000);

}  // namespace rsim::mobility
