#pragma once
// Active-cell lattice under the Protocol interference model, per-slot
// sender/receiver selection, and the closed-form scheduling rates of the
// relay protocol.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rsim/mobility.hpp"
#include "rsim/rng.hpp"

namespace rsim::scheduler {

struct Lattice {
  double delta = 0.0;        // Protocol-model guard parameter
  int spacing = 0;           // k = ceil(sqrt(2) * (1 + delta)) + 1
  double theta_prime = 0.0;  // 1 / k^2, active-cell fraction on exact grids
  int off_i = 0;             // lattice offsets in [0, spacing)
  int off_j = 0;
};

// delta >= 0 required.  The ceiling is taken with a small tolerance so
// products that are exact integers in real arithmetic (e.g. sqrt(2) times
// sqrt(2)) do not round up through floating-point noise.
Lattice make_lattice(double delta);

// Cells {(i, j) : i = off_i, j = off_j (mod spacing)} as sorted flat
// indices i * side + j.  Requires spacing | side so the active fraction is
// exactly theta_prime and wrap-around never shrinks the gap; throws
// std::invalid_argument otherwise.
std::vector<std::uint32_t> active_cells(int side, const Lattice& lat);

// Largest regular sublattice honoring the spacing when spacing does not
// divide side: floor(side / spacing) positions per axis, so the active
// fraction falls below theta_prime.  Callers doing exact-rate bookkeeping
// must use the returned count rather than theta_prime.
std::vector<std::uint32_t> active_cells_ragged(int side, const Lattice& lat);

// Counting-sort index of nodes grouped by cell (node ids ascending).
struct Occupancy {
  std::vector<std::uint32_t> start;  // size n_cells + 1
  std::vector<std::uint32_t> node;   // node ids grouped by cell

  void build(std::span<const std::uint32_t> cell_of_node, std::uint32_t n_cells);
  std::span<const std::uint32_t> of(std::uint32_t cell) const {
    return {node.data() + start[cell], node.data() + start[cell + 1]};
  }
};

struct Assignment {
  std::uint32_t cell = 0;
  std::uint32_t sender = 0;
  std::uint32_t receiver = 0;
  bool source_role = false;  // true: source action; false: relay action
};

struct SlotSchedule {
  std::vector<Assignment> assignments;  // ascending cell index
};

// For each active cell with at least two occupants: sender uniform over
// occupants, receiver uniform over the rest, source role with probability
// p_s.  Draws come from the stream keyed by (seed, slot, cell), so the
// schedule is a pure function of (seed, slot, positions).
SlotSchedule select_transmissions(const Occupancy& occ,
                                  std::span<const std::uint32_t> active,
                                  double p_s, std::uint64_t seed,
                                  std::uint64_t slot);

// Samples continuous intra-cell positions for every assignment and checks
// the Protocol-model inequality for each scheduled receiver against every
// other scheduled sender, on the unit torus with cell edge 1/side.
// Returns false if any sampled placement violates the inequality.
bool validate_protocol_model(const SlotSchedule& sched, int side, double delta,
                             std::uint32_t trials, std::uint64_t seed);

// Probability of at least two nodes in a cell when n nodes fall uniformly
// into n cells: 1 - (1 - 1/n)^n - (1 - 1/n)^(n-1).
double p1(std::uint32_t n);

// Fraction of nodes with a successful transmission per slot: theta' p1(n).
double expected_theta(std::uint32_t n, double delta);

// Large-n limit of expected_theta: theta' (1 - 2/e).
double theta0(double delta);

// Probability a given node is chosen as receiver by a relay-role sender:
// theta' (1 - p_s) ((n-2)/(n-1)) p1(n).
double p2(std::uint32_t n, double p_s, double delta);
double p2_limit(double p_s, double delta);

// Expected slots for a source to send n versions: n / (p_s theta' p1(n)).
double t_s(std::uint32_t n, double p_s, double delta);

struct C1Window {
  double lo = 0.0;  // (c0 + 1) / (e ln 2)
  double hi = 0.0;  // 1 / (theta' p_s)
};
C1Window c1_window(double p_s, double delta, double c0 = 3.0);

// Generation-ratio bound (p_s theta0 / (1 + theta0 p_s)) * (p2 c1 / (c1+1))
// using the limiting constants; c1 must lie strictly inside the window or
// std::domain_error is thrown.
double delta_bound(double p_s, double delta, double c1, double c0 = 3.0);

struct DeltaBoundWindow {
  double at_c1_lo = 0.0;
  double at_c1_hi = 0.0;
};
// Bound evaluated at the window endpoints (as limits), full precision.
DeltaBoundWindow delta_bound_window(double p_s, double delta, double c0 = 3.0);
// Same, but with the limiting constants and c1 ratios rounded to four
// decimal places first -- the precision at which they are usually quoted.
DeltaBoundWindow delta_bound_window_4dp(double p_s, double delta, double c0 = 3.0);

}  // namespace rsim::scheduler
