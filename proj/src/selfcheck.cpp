#include "rsim/selfcheck.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "rsim/mobility.hpp"
#include "rsim/rng.hpp"
#include "rsim/rs.hpp"
#include "rsim/scheduler.hpp"

namespace rsim::selfcheck {

namespace {

void expect(SuiteResult& r, bool ok, const std::string& what) {
  ++r.checks;
  if (!ok) {
    ++r.failures;
    if (r.notes.size() < 16) r.notes.push_back(what);
  }
}

// --- naive GF(2)[x] arithmetic used as the oracle ---

int poly_degree(std::uint64_t p) { return std::bit_width(p) - 1; }

std::uint64_t poly_mod(std::uint64_t a, std::uint64_t m) {
  const int dm = poly_degree(m);
  while (a != 0 && poly_degree(a) >= dm) a ^= m << (poly_degree(a) - dm);
  return a;
}

bool poly_irreducible(std::uint64_t p) {
  const int d = poly_degree(p);
  if (d < 1) return false;
  for (std::uint64_t q = 2; q < (1ull << (d / 2 + 1)); ++q) {
    if (poly_degree(q) < 1) continue;
    if (poly_mod(p, q) == 0) return false;
  }
  return true;
}

// Oracle field multiply: carryless product, then long division.
gf::Element oracle_mul(const gf::Field& f, gf::Element a, gf::Element b) {
  std::uint64_t prod = 0;
  for (std::uint64_t x = a, y = b; y; y >>= 1, x <<= 1)
    if (y & 1) prod ^= x;
  return static_cast<gf::Element>(poly_mod(prod, f.modulus));
}

}  // namespace

SuiteResult check_modulus_table() {
  SuiteResult r;
  r.name = "modulus-table";
  for (int s = 1; s <= gf::kMaxDegree; ++s) {
    // smallest degree-s irreducible with nonzero constant term
    std::uint64_t want = 0;
    for (std::uint64_t p = (1ull << s) | 1; p < (2ull << s); p += 2)
      if (poly_irreducible(p)) {
        want = p;
        break;
      }
    expect(r, want == gf::kModulus[s],
           "canonical modulus mismatch at s=" + std::to_string(s));
    expect(r, poly_irreducible(gf::kModulus[s]),
           "shipped modulus reducible at s=" + std::to_string(s));
  }
  return r;
}

SuiteResult check_field_axioms_on(const gf::Field& f) {
  SuiteResult r;
  r.name = "field-axioms-s" + std::to_string(f.s);
  const std::uint32_t q = f.q;
  for (std::uint32_t a = 0; a < q; ++a) {
    expect(r, gf::add(static_cast<gf::Element>(a), static_cast<gf::Element>(a)) == 0,
           "a+a != 0");
    for (std::uint32_t b = 0; b < q; ++b) {
      const auto ea = static_cast<gf::Element>(a);
      const auto eb = static_cast<gf::Element>(b);
      expect(r, gf::mul(f, ea, eb) == gf::mul(f, eb, ea), "commutativity");
      expect(r, gf::mul(f, ea, eb) == oracle_mul(f, ea, eb), "oracle product");
      for (std::uint32_t c = 0; c < q; ++c) {
        const auto ec = static_cast<gf::Element>(c);
        expect(r, gf::mul(f, gf::mul(f, ea, eb), ec) == gf::mul(f, ea, gf::mul(f, eb, ec)),
               "associativity");
        expect(r,
               gf::mul(f, ea, gf::add(eb, ec)) ==
                   gf::add(gf::mul(f, ea, eb), gf::mul(f, ea, ec)),
               "distributivity");
      }
    }
  }
  for (std::uint32_t a = 1; a < q; ++a) {
    const auto ea = static_cast<gf::Element>(a);
    // unique inverse by exhaustive search
    std::uint32_t inverses = 0;
    gf::Element found = 0;
    for (std::uint32_t b = 1; b < q; ++b)
      if (gf::mul(f, ea, static_cast<gf::Element>(b)) == 1) {
        ++inverses;
        found = static_cast<gf::Element>(b);
      }
    expect(r, inverses == 1, "inverse not unique");
    expect(r, gf::inv(f, ea) == found, "inv() disagrees with search");
    expect(r, gf::pow(f, ea, q - 1) == 1, "a^(q-1) != 1");
  }
  return r;
}

SuiteResult check_field_axioms(int max_exhaustive) {
  SuiteResult r;
  r.name = "field-axioms";
  for (int s = 1; s <= max_exhaustive; ++s) {
    const auto sub = check_field_axioms_on(gf::make_field(s));
    r.checks += sub.checks;
    r.failures += sub.failures;
    for (const auto& n : sub.notes)
      if (r.notes.size() < 16) r.notes.push_back(n);
  }
  // randomized spot checks in larger fields
  for (int s : {8, 12, 16}) {
    const auto f = gf::make_field(s);
    rng::Stream st(99, rng::Tag::kPayload, static_cast<std::uint64_t>(s), 0);
    for (int t = 0; t < 2000; ++t) {
      const auto a = static_cast<gf::Element>(st.bounded(f.q));
      const auto b = static_cast<gf::Element>(st.bounded(f.q));
      expect(r, gf::mul(f, a, b) == oracle_mul(f, a, b), "oracle product (large s)");
      if (a != 0) {
        expect(r, gf::mul(f, a, gf::inv(f, a)) == 1, "a * inv(a) != 1 (large s)");
        expect(r, gf::pow(f, a, f.q - 1) == 1, "a^(q-1) != 1 (large s)");
      }
    }
  }
  return r;
}

namespace {

void roundtrip_exhaustive(SuiteResult& r, std::uint32_t m, std::uint32_t n) {
  const auto code = rs::make_code(m, n);
  const std::uint32_t q = code.field.q;
  std::vector<gf::Element> payload(m);
  std::vector<std::uint32_t> subset(m);
  // iterate all payloads
  std::uint64_t total = 1;
  for (std::uint32_t i = 0; i < m; ++i) total *= q;
  for (std::uint64_t pi = 0; pi < total; ++pi) {
    std::uint64_t v = pi;
    for (std::uint32_t i = 0; i < m; ++i) {
      payload[i] = static_cast<gf::Element>(v % q);
      v /= q;
    }
    const auto codeword = rs::encode(code, payload);
    // iterate all m-subsets of {1..n}
    std::iota(subset.begin(), subset.end(), 0);
    for (;;) {
      std::vector<rs::Received> recv(m);
      for (std::uint32_t i = 0; i < m; ++i)
        recv[i] = {subset[i] + 1, codeword[subset[i]]};
      const auto decoded = rs::decode(code, recv);
      expect(r, decoded == payload,
             "round-trip failed at (m=" + std::to_string(m) + ",n=" + std::to_string(n) + ")");
      // next combination
      int i = static_cast<int>(m) - 1;
      while (i >= 0 && subset[i] == n - m + static_cast<std::uint32_t>(i)) --i;
      if (i < 0) break;
      ++subset[i];
      for (auto j = static_cast<std::uint32_t>(i) + 1; j < m; ++j)
        subset[j] = subset[j - 1] + 1;
    }
  }
}

}  // namespace

SuiteResult check_rs_roundtrips(std::uint32_t random_trials, std::uint64_t seed) {
  SuiteResult r;
  r.name = "rs-roundtrip";
  roundtrip_exhaustive(r, 1, 8);
  roundtrip_exhaustive(r, 2, 8);
  roundtrip_exhaustive(r, 3, 8);
  roundtrip_exhaustive(r, 3, 5);
  // randomized large parameters
  const auto code = rs::make_code(28, 256);
  rng::Stream st(seed, rng::Tag::kPayload, 0, 0);
  std::vector<gf::Element> payload(code.m);
  std::vector<std::uint32_t> idx(code.n);
  for (std::uint32_t t = 0; t < random_trials; ++t) {
    for (auto& sym : payload)
      sym = static_cast<gf::Element>(st.bounded(code.field.q));
    const auto codeword = rs::encode(code, payload);
    std::iota(idx.begin(), idx.end(), 0u);
    for (std::uint32_t i = code.n - 1; i > 0; --i) {
      const auto j = static_cast<std::uint32_t>(st.bounded(i + 1));
      std::swap(idx[i], idx[j]);
    }
    std::vector<rs::Received> recv(code.m);
    for (std::uint32_t i = 0; i < code.m; ++i)
      recv[i] = {idx[i] + 1, codeword[idx[i]]};
    const auto decoded = rs::decode(code, recv);
    expect(r, decoded == payload, "randomized round-trip failed");
  }
  return r;
}

SuiteResult check_rs_mds() {
  SuiteResult r;
  r.name = "rs-mds";
  const std::pair<std::uint32_t, std::uint32_t> cases[] = {{2, 6}, {3, 6}, {2, 5}};
  for (const auto& [m, n] : cases) {
    const auto code = rs::make_code(m, n);
    const std::uint32_t q = code.field.q;
    std::uint32_t min_weight = n + 1;
    std::vector<gf::Element> payload(m);
    std::uint64_t total = 1;
    for (std::uint32_t i = 0; i < m; ++i) total *= q;
    for (std::uint64_t pi = 1; pi < total; ++pi) {  // nonzero payloads
      std::uint64_t v = pi;
      for (std::uint32_t i = 0; i < m; ++i) {
        payload[i] = static_cast<gf::Element>(v % q);
        v /= q;
      }
      const auto codeword = rs::encode(code, payload);
      std::uint32_t w = 0;
      for (const auto sym : codeword)
        if (sym != 0) ++w;
      min_weight = std::min(min_weight, w);
    }
    expect(r, min_weight == n - m + 1,
           "minimum distance != n-m+1 for (n=" + std::to_string(n) +
               ",m=" + std::to_string(m) + "): got " + std::to_string(min_weight));
  }
  return r;
}

SuiteResult check_mobility(std::uint64_t meetings, std::uint64_t seed) {
  SuiteResult r;
  r.name = "mobility";
  for (int side = 1; side <= 16; ++side) {
    const auto p = mobility::transition_matrix(side);
    for (std::size_t i = 0; i < p.n; ++i) {
      double row = 0.0, col = 0.0;
      for (std::size_t j = 0; j < p.n; ++j) {
        row += p.at(i, j);
        col += p.at(j, i);
      }
      expect(r, std::abs(row - 1.0) < 1e-12, "row sum != 1");
      expect(r, std::abs(col - 1.0) < 1e-12, "column sum != 1");
    }
  }
  for (int side : {3, 8, 15}) {
    const auto stats = mobility::meeting_stats(side, meetings, seed);
    // even sides measure the meeting-feasible parity class, mean n/2
    const double n = static_cast<double>(side) * side;
    const double want = side % 2 == 0 ? n / 2.0 : n;
    expect(r, std::abs(stats.mean - want) / want < 0.05,
           "inter-meeting mean off at side=" + std::to_string(side) + ": " +
               std::to_string(stats.mean));
  }
  return r;
}

SuiteResult check_lattice_geometry(std::uint64_t seed) {
  SuiteResult r;
  r.name = "lattice-geometry";
  const auto lat = scheduler::make_lattice(std::sqrt(2.0) - 1.0);
  expect(r, lat.spacing == 3, "spacing != 3 at the reference guard value");
  for (int side : {3, 9, 15, 21, 7, 11}) {
    const auto cells = side % lat.spacing == 0
                           ? scheduler::active_cells(side, lat)
                           : scheduler::active_cells_ragged(side, lat);
    // pairwise torus L-infinity distance >= spacing
    for (std::size_t a = 0; a < cells.size(); ++a)
      for (std::size_t b = a + 1; b < cells.size(); ++b) {
        const int ai = static_cast<int>(cells[a]) / side, aj = static_cast<int>(cells[a]) % side;
        const int bi = static_cast<int>(cells[b]) / side, bj = static_cast<int>(cells[b]) % side;
        auto circ = [side](int x, int y) {
          const int d = std::abs(x - y);
          return std::min(d, side - d);
        };
        const int dist = std::max(circ(ai, bi), circ(aj, bj));
        expect(r, dist >= lat.spacing, "active cells closer than the spacing");
      }
    if (side % lat.spacing == 0)
      expect(r, cells.size() * static_cast<std::size_t>(lat.spacing) * lat.spacing ==
                    static_cast<std::size_t>(side) * side,
             "active fraction != theta_prime on an exact grid");
  }
  // sampled Protocol-model validation on a synthetic full schedule
  const int side = 15;
  const auto cells = scheduler::active_cells(side, lat);
  scheduler::SlotSchedule sched;
  for (const auto c : cells) sched.assignments.push_back({c, 0, 1, true});
  expect(r, scheduler::validate_protocol_model(sched, side, lat.delta, 2000, seed),
         "Protocol-model inequality violated by sampled placements");
  return r;
}

std::vector<SuiteResult> run_all() {
  std::vector<SuiteResult> out;
  out.push_back(check_modulus_table());
  out.push_back(check_field_axioms());
  out.push_back(check_rs_roundtrips());
  out.push_back(check_rs_mds());
  out.push_back(check_mobility());
  out.push_back(check_lattice_geometry());
  return out;
}

}  // namespace rsim::selfcheck
