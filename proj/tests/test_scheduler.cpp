#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "rsim/mobility.hpp"
#include "rsim/scheduler.hpp"
#include "rsim/selfcheck.hpp"

using namespace rsim;

TEST_SUITE("scheduler") {

TEST_CASE("lattice spacing and active fraction") {
  const auto guard = scheduler::make_lattice(std::numbers::sqrt2 - 1.0);
  CHECK(guard.spacing == 3);
  CHECK(guard.theta_prime == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

  const auto zero = scheduler::make_lattice(0.0);
  CHECK(zero.spacing == 3);

  const auto one = scheduler::make_lattice(1.0);
  CHECK(one.spacing == 4);
  CHECK(one.theta_prime == doctest::Approx(1.0 / 16.0).epsilon(1e-15));

  CHECK_THROWS_AS(scheduler::make_lattice(-0.1), std::invalid_argument);
}

TEST_CASE("active cells on exact grids") {
  const auto lat = scheduler::make_lattice(std::numbers::sqrt2 - 1.0);
  const auto cells = scheduler::active_cells(15, lat);
  REQUIRE(cells.size() == 25);
  for (const auto c : cells) {
    CHECK(static_cast<int>(c) / 15 % 3 == 0);
    CHECK(static_cast<int>(c) % 15 % 3 == 0);
  }
  CHECK(scheduler::active_cells(3, lat).size() == 1);
  CHECK_THROWS_AS(scheduler::active_cells(16, lat), std::invalid_argument);

  auto offset = lat;
  offset.off_i = 1;
  offset.off_j = 2;
  for (const auto c : scheduler::active_cells(9, offset)) {
    CHECK(static_cast<int>(c) / 9 % 3 == 1);
    CHECK(static_cast<int>(c) % 9 % 3 == 2);
  }
}

TEST_CASE("ragged grids keep the spacing and shrink the fraction") {
  const auto lat = scheduler::make_lattice(std::numbers::sqrt2 - 1.0);
  CHECK(scheduler::active_cells_ragged(7, lat).size() == 4);
  CHECK(scheduler::active_cells_ragged(11, lat).size() == 9);
  CHECK_THROWS_AS(scheduler::active_cells_ragged(2, lat), std::invalid_argument);
  const auto geometry = selfcheck::check_lattice_geometry();
  CHECK(geometry.failures == 0);
}

TEST_CASE("closed-form rates") {
  CHECK(scheduler::p1(4) == doctest::Approx(0.26171875).epsilon(1e-12));
  // independent long-double evaluation by repeated multiplication
  long double r = 1.0L - 1.0L / 225.0L, pn = 1.0L;
  for (int i = 0; i < 224; ++i) pn *= r;
  const double oracle = static_cast<double>(1.0L - pn * r - pn);
  CHECK(scheduler::p1(225) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(scheduler::p1(225) == doctest::Approx(0.2642405093927089).epsilon(1e-12));
  CHECK_THROWS_AS(scheduler::p1(1), std::invalid_argument);

  const double delta = std::numbers::sqrt2 - 1.0;
  CHECK(scheduler::expected_theta(225, delta) ==
        doctest::Approx(scheduler::p1(225) / 9.0).epsilon(1e-15));
  CHECK(scheduler::theta0(delta) ==
        doctest::Approx((1.0 - 2.0 / std::numbers::e) / 9.0).epsilon(1e-15));

  CHECK(scheduler::p2_limit(0.5, delta) ==
        doctest::Approx(0.014680062092061963).epsilon(1e-12));
  CHECK(scheduler::p2(225, 0.5, delta) ==
        doctest::Approx(0.014614492458971746).epsilon(1e-12));
  CHECK(scheduler::p2(225, 1.0, delta) == doctest::Approx(0.0));

  CHECK(scheduler::t_s(225, 0.5, delta) ==
        doctest::Approx(15326.94593008437).epsilon(1e-12));
  CHECK(scheduler::t_s(225, 0.5, delta) ==
        doctest::Approx(2.0 * scheduler::t_s(225, 1.0, delta)).epsilon(1e-12));
  CHECK_THROWS_AS(scheduler::t_s(225, 0.0, delta), std::invalid_argument);
}

TEST_CASE("generation-ratio bound and its admissible window") {
  const double delta = std::numbers::sqrt2 - 1.0;
  const auto w = scheduler::c1_window(0.5, delta, 3.0);
  CHECK(w.lo == doctest::Approx(2.122951381692172).epsilon(1e-12));
  CHECK(w.hi == doctest::Approx(18.0).epsilon(1e-12));

  // direct re-expression of the bound at an interior point
  const double c1 = 10.0;
  const double t0 = (1.0 - 2.0 / std::numbers::e) / 9.0;
  const double p2l = (1.0 - 2.0 / std::numbers::e) / 18.0;
  const double direct = (0.5 * t0 / (1.0 + 0.5 * t0)) * p2l * (c1 / (c1 + 1.0));
  CHECK(scheduler::delta_bound(0.5, delta, c1) == doctest::Approx(direct).epsilon(1e-14));

  CHECK_THROWS_AS(scheduler::delta_bound(0.5, delta, 18.0), std::domain_error);
  CHECK_THROWS_AS(scheduler::delta_bound(0.5, delta, 2.0), std::domain_error);

  const auto full = scheduler::delta_bound_window(0.5, delta);
  CHECK(full.at_c1_lo == doctest::Approx(1.4437815358700013e-4).epsilon(1e-9));
  CHECK(full.at_c1_hi == doctest::Approx(2.0120814740178173e-4).epsilon(1e-9));

  const auto quoted = scheduler::delta_bound_window_4dp(0.5, delta);
  CHECK(quoted.at_c1_lo == doctest::Approx(1.4476986498472455e-4).epsilon(1e-9));
  CHECK(quoted.at_c1_hi == doctest::Approx(2.0175782595841137e-4).epsilon(1e-9));
  // reproduces the usually quoted endpoints to one unit in the 4th decimal
  CHECK(std::abs(quoted.at_c1_lo - 1.4480e-4) <= 1e-7);
  CHECK(std::abs(quoted.at_c1_hi - 2.0176e-4) <= 1e-7);
}

TEST_CASE("per-cell selection: occupancy rules and sender symmetry") {
  // cells: 0 has node 0 alone; cell 4 has nodes 1 and 2
  const std::vector<std::uint32_t> positions{0, 4, 4};
  scheduler::Occupancy occ;
  occ.build(positions, 9);
  CHECK(occ.of(0).size() == 1);
  CHECK(occ.of(4).size() == 2);
  const std::vector<std::uint32_t> active{0, 4};

  int sender1 = 0, total = 0;
  for (std::uint64_t slot = 0; slot < 10000; ++slot) {
    const auto sched = scheduler::select_transmissions(occ, active, 0.5, 99, slot);
    REQUIRE(sched.assignments.size() == 1);  // the lone occupant never transmits
    const auto& a = sched.assignments[0];
    CHECK(a.cell == 4);
    CHECK(a.sender != a.receiver);
    ++total;
    if (a.sender == 1) ++sender1;
  }
  CHECK(std::abs(sender1 / double(total) - 0.5) < 0.02);
}

TEST_CASE("per-node scheduling frequency matches the closed form") {
  const double delta = std::numbers::sqrt2 - 1.0;
  const auto lat = scheduler::make_lattice(delta);
  const auto active = scheduler::active_cells(15, lat);
  auto walkers = mobility::init_uniform(225, 5);
  scheduler::Occupancy occ;
  std::uint64_t assignments = 0;
  std::vector<std::uint64_t> per_node(225, 0);
  constexpr std::uint64_t kSlots = 20000;
  for (std::uint64_t t = 0; t < kSlots; ++t) {
    occ.build(walkers.cells, 225);
    const auto sched = scheduler::select_transmissions(occ, active, 0.5, 5, t);
    assignments += sched.assignments.size();
    for (const auto& a : sched.assignments) ++per_node[a.sender];
    mobility::advance_serial(walkers);
  }
  const double frac = static_cast<double>(assignments) / (kSlots * 225.0);
  CHECK(std::abs(frac - scheduler::expected_theta(225, delta)) /
            scheduler::expected_theta(225, delta) <
        0.05);
}

TEST_CASE("sampled geometry obeys the interference inequality") {
  const auto lat = scheduler::make_lattice(std::numbers::sqrt2 - 1.0);
  const auto cells = scheduler::active_cells(15, lat);
  scheduler::SlotSchedule sched;
  for (const auto c : cells) sched.assignments.push_back({c, 0, 1, true});
  CHECK(scheduler::validate_protocol_model(sched, 15, lat.delta, 500, 3));

  // adjacent cells must violate it
  scheduler::SlotSchedule bad;
  bad.assignments.push_back({0, 0, 1, true});
  bad.assignments.push_back({1, 2, 3, true});
  CHECK_FALSE(scheduler::validate_protocol_model(bad, 15, lat.delta, 500, 3));
}

}  // TEST_SUITE
