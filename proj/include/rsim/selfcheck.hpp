#pragma once
// Built-in verification suites shared by the CLI selftest subcommand, the
// unit tests and the acceptance suite.  Each suite counts the checks it
// performed and the checks that failed; oracles here are deliberately
// independent of the implementation paths they verify (naive polynomial
// arithmetic, exhaustive search, direct enumeration).

#include <cstdint>
#include <string>
#include <vector>

#include "rsim/gf.hpp"

namespace rsim::selfcheck {

struct SuiteResult {
  std::string name;
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::vector<std::string> notes;

  bool ok() const { return failures == 0; }
};

// Re-derives the canonical modulus table by exhaustive irreducibility
// search (trial division over GF(2)[x]).
SuiteResult check_modulus_table();

// Commutativity, associativity, distributivity, unique inverses,
// a^(q-1) = 1 and a + a = 0, exhaustive for s <= max_exhaustive.
SuiteResult check_field_axioms(int max_exhaustive = 4);

// Same axioms against an arbitrary field spec; a corrupted modulus makes
// this fail, which the selftest machinery must detect.
SuiteResult check_field_axioms_on(const gf::Field& field);

// Exhaustive encode/decode round-trips over GF(8) for (n, m) in
// {(8,1), (8,2), (8,3), (5,3)}: every payload, every m-subset of
// coordinates; plus a randomized large-parameter round-trip.
SuiteResult check_rs_roundtrips(std::uint32_t random_trials = 10000,
                                std::uint64_t seed = 12345);

// Minimum Hamming distance equals n - m + 1 exactly for (6,2), (6,3), (5,2).
SuiteResult check_rs_mds();

// Transition matrices doubly stochastic for side <= 16; short inter-meeting
// check against the exact mean (side^2).
SuiteResult check_mobility(std::uint64_t meetings = 20000, std::uint64_t seed = 7);

// Lattice spacing property on exact and ragged grids plus sampled
// Protocol-model geometry validation.
SuiteResult check_lattice_geometry(std::uint64_t seed = 11);

std::vector<SuiteResult> run_all();

}  // namespace rsim::selfcheck
