#pragma once
// (n, m) Reed-Solomon evaluation code over GF(2^s) with erasure decoding
// from any m distinct coordinates.
//
// The codeword for payload (y_0 ... y_{m-1}) is (f(b_1), ..., f(b_n)) with
// f(x) = y_0 + y_1 x + ... + y_{m-1} x^{m-1} and evaluation points b_k
// being the field elements 0, 1, 2, ... in value order.  Version indices
// are 1-based: version k evaluates at b_k = k - 1.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rsim/gf.hpp"

namespace rsim::rs {

using gf::Element;

struct Code {
  std::uint32_t m = 0;  // information symbols per generation
  std::uint32_t n = 0;  // codeword length (number of versions)
  gf::Field field;
  std::vector<Element> points;  // points[k-1] is the evaluation point of version k
};

// One delivered codeword coordinate.
struct Received {
  std::uint32_t k = 0;  // version index, 1-based
  Element symbol = 0;
};

struct InsufficientVersions : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CorruptIndex : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InconsistentSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Smallest binary field with q >= n; throws std::invalid_argument when
// m < 1, m > n, or n exceeds the supported field sizes.
Code make_code(std::uint32_t m, std::uint32_t n);

// Payload must have exactly m symbols, each < q.
std::vector<Element> encode(const Code& c, std::span<const Element> payload);

// Recovers the unique payload consistent with the received coordinates.
// Decodes from the m lowest version indices; any further entries are
// checked against the re-evaluated codeword and a mismatch raises
// InconsistentSet.  Fewer than m distinct indices raises
// InsufficientVersions; an index outside [1, n] or a repeated index
// raises CorruptIndex.
std::vector<Element> decode(const Code& c, std::span<const Received> received);

}  // namespace rsim::rs
