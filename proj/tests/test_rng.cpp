#include <doctest.h>

#include <set>

#include "rsim/rng.hpp"

using namespace rsim;

TEST_SUITE("rng") {

TEST_CASE("streams are reproducible and keyed") {
  rng::Stream a(42, rng::Tag::kMove, 7, 3);
  rng::Stream b(42, rng::Tag::kMove, 7, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  rng::Stream c(42, rng::Tag::kMove, 7, 4);
  rng::Stream d(42, rng::Tag::kSchedule, 7, 3);
  rng::Stream e(43, rng::Tag::kMove, 7, 3);
  rng::Stream base(42, rng::Tag::kMove, 7, 3);
  CHECK(base.next() != c.next());
  CHECK(rng::Stream(42, rng::Tag::kMove, 7, 3).next() != d.next());
  CHECK(rng::Stream(42, rng::Tag::kMove, 7, 3).next() != e.next());
}

TEST_CASE("bounded draws stay in range and cover all values") {
  rng::Stream st(1, rng::Tag::kPairing, 0, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = st.bounded(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("bounded is unbiased enough for a coarse chi-square") {
  rng::Stream st(9, rng::Tag::kPairing, 1, 0);
  constexpr int kBuckets = 10;
  constexpr int kDraws = 100000;
  int count[kBuckets] = {};
  for (int i = 0; i < kDraws; ++i) ++count[st.bounded(kBuckets)];
  double chi2 = 0.0;
  const double expect = double(kDraws) / kBuckets;
  for (const int c : count) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 40.0);  // df=9; this is far beyond any sane quantile
}

TEST_CASE("unit lies in [0,1) and coin respects edge probabilities") {
  rng::Stream st(5, rng::Tag::kPayload, 0, 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = st.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  rng::Stream c1(5, rng::Tag::kPayload, 1, 0);
  for (int i = 0; i < 100; ++i) CHECK(c1.coin(1.0));
  rng::Stream c0(5, rng::Tag::kPayload, 2, 0);
  for (int i = 0; i < 100; ++i) CHECK_FALSE(c0.coin(0.0));
}

TEST_CASE("uniform4 hits all four directions") {
  int count[4] = {};
  for (std::uint64_t t = 0; t < 4000; ++t)
    ++count[rng::uniform4(3, rng::Tag::kMove, t, 0)];
  for (const int c : count) CHECK(c > 800);
}

}  // TEST_SUITE
