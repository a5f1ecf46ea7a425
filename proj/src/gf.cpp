#include "rsim/gf.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace rsim::gf {

Field make_field(int s) {
  if (s < 1 || s > kMaxDegree)
    throw std::invalid_argument("gf: extension degree must be in [1, 16], got " +
                                std::to_string(s));
  Field f;
  f.s = s;
  f.q = 1u << s;
  f.modulus = kModulus[s];
  return f;
}

Element mul(const Field& f, Element a, Element b) noexcept {
  std::uint32_t acc = 0;
  std::uint32_t x = a;
  for (std::uint32_t y = b; y != 0; y >>= 1) {
    if (y & 1u) acc ^= x;
    x <<= 1;
  }
  while (acc >= f.q) {
    const int shift = std::bit_width(acc) - (f.s + 1);
    acc ^= f.modulus << shift;
  }
  return static_cast<Element>(acc);
}

Element pow(const Field& f, Element a, std::uint32_t e) noexcept {
  Element result = 1;
  Element base = a;
  while (e != 0) {
    if (e & 1u) result = mul(f, result, base);
    base = mul(f, base, base);
    e >>= 1;
  }
  return result;
}

Element inv(const Field& f, Element a) {
  if (a == 0) throw std::domain_error("gf: division by zero");
  return pow(f, a, f.q - 2);
}

}  // namespace rsim::gf
