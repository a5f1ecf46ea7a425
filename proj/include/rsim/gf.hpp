#pragma once
// Arithmetic in binary extension fields GF(2^s), 1 <= s <= 16.
//
// Each field is reduced by a fixed canonical modulus: the smallest
// irreducible polynomial of degree s (by integer value of its bit
// pattern) with nonzero constant term.  The table is pinned so encoded
// symbols are bit-identical across builds and platforms.

#include <cstdint>

namespace rsim::gf {

using Element = std::uint16_t;

struct Field {
  int s = 0;                  // extension degree
  std::uint32_t q = 0;        // field size, 2^s
  std::uint32_t modulus = 0;  // irreducible polynomial, bit i = coefficient of x^i
};

inline constexpr int kMaxDegree = 16;

// Canonical modulus per degree; index 0 unused.
inline constexpr std::uint32_t kModulus[kMaxDegree + 1] = {
    0,     0x3,    0x7,    0xb,    0x13,   0x25,   0x43,   0x83,  0x11b,
    0x203, 0x409,  0x805,  0x1009, 0x201b, 0x4021, 0x8003, 0x1002b};

// Throws std::invalid_argument unless 1 <= s <= 16.
Field make_field(int s);

constexpr Element add(Element a, Element b) noexcept {
  return static_cast<Element>(a ^ b);
}

// Carryless polynomial product reduced modulo the field modulus.
Element mul(const Field& f, Element a, Element b) noexcept;

Element pow(const Field& f, Element a, std::uint32_t e) noexcept;

// Multiplicative inverse; throws std::domain_error on a == 0.
Element inv(const Field& f, Element a);

}  // namespace rsim::gf
