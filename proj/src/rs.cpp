#include "rsim/rs.hpp"

#include <algorithm>
#include <string>

namespace rsim::rs {

Code make_code(std::uint32_t m, std::uint32_t n) {
  if (m < 1 || m > n)
    throw std::invalid_argument("rs: need 1 <= m <= n, got m=" + std::to_string(m) +
                                " n=" + std::to_string(n));
  int s = 1;
  while ((1u << s) < n) {
    ++s;
    if (s > gf::kMaxDegree)
      throw std::invalid_argument("rs: n=" + std::to_string(n) +
                                  " exceeds the largest supported field (2^16)");
  }
  Code c;
  c.m = m;
  c.n = n;
  c.field = gf::make_field(s);
  c.points.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) c.points[i] = static_cast<Element>(i);
  return c;
}

std::vector<Element> encode(const Code& c, std::span<const Element> payload) {
  if (payload.size() != c.m)
    throw std::invalid_argument("rs: payload has " + std::to_string(payload.size()) +
                                " symbols, expected " + std::to_string(c.m));
  std::vector<Element> out(c.n);
  for (std::uint32_t i = 0; i < c.n; ++i) {
    const Element x = c.points[i];
    Element acc = payload[c.m - 1];
    for (std::uint32_t j = c.m - 1; j-- > 0;)
      acc = gf::add(gf::mul(c.field, acc, x), payload[j]);
    out[i] = acc;
  }
  return out;
}

namespace {

// Evaluate a coefficient vector at x.
Element eval(const Code& c, std::span<const Element> coef, Element x) {
  Element acc = coef[coef.size() - 1];
  for (std::size_t j = coef.size() - 1; j-- > 0;)
    acc = gf::add(gf::mul(c.field, acc, x), coef[j]);
  return acc;
}

}  // namespace

std::vector<Element> decode(const Code& c, std::span<const Received> received) {
  std::vector<Received> entries(received.begin(), received.end());
  for (const auto& e : entries)
    if (e.k < 1 || e.k > c.n)
      throw CorruptIndex("rs: version index " + std::to_string(e.k) +
                         " outside [1, " + std::to_string(c.n) + "]");
  std::sort(entries.begin(), entries.end(),
            [](const Received& a, const Received& b) { return a.k < b.k; });
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].k == entries[i - 1].k)
      throw CorruptIndex("rs: repeated version index " + std::to_string(entries[i].k));
  if (entries.size() < c.m)
    throw InsufficientVersions("rs: got " + std::to_string(entries.size()) +
                               " versions, need " + std::to_string(c.m));

  // Newton interpolation through the m lowest-index coordinates.
  const std::uint32_t m = c.m;
  std::vector<Element> x(m), dd(m);
  for (std::uint32_t i = 0; i < m; ++i) {
    x[i] = c.points[entries[i].k - 1];
    dd[i] = entries[i].symbol;
  }
  for (std::uint32_t j = 1; j < m; ++j)
    for (std::uint32_t i = m - 1; i >= j; --i)
      dd[i] = gf::mul(c.field, gf::add(dd[i], dd[i - 1]),
                      gf::inv(c.field, gf::add(x[i], x[i - j])));

  // Expand the Newton form to monomial coefficients.
  std::vector<Element> coef(m, 0);
  coef[0] = dd[m - 1];
  std::uint32_t deg = 0;
  for (std::uint32_t i = m - 1; i-- > 0;) {
    // coef <- coef * (x + x[i]) + dd[i]
    for (std::uint32_t j = deg + 2; j-- > 1;)
      coef[j] = gf::add(coef[j - 1], gf::mul(c.field, coef[j], x[i]));
    coef[0] = gf::mul(c.field, coef[0], x[i]);
    coef[0] = gf::add(coef[0], dd[i]);
    ++deg;
  }

  // Any surplus coordinates must agree with the interpolated polynomial.
  for (std::size_t i = m; i < entries.size(); ++i) {
    const Element want = eval(c, coef, c.points[entries[i].k - 1]);
    if (want != entries[i].symbol)
      throw InconsistentSet("rs: version " + std::to_string(entries[i].k) +
                            " disagrees with the decoded payload");
  }
  return coef;
}

}  // namespace rsim::rs
