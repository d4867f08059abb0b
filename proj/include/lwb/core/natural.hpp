#pragma once

// Arbitrary-precision naturals and the pairing machinery every code in the
// library is built from.
//
//   pair(a, b)   = (a + b)(a + b + 1) / 2 + b        (Cantor)
//   seq([])      = 0
//   seq(x : xs)  = pair(x, seq(xs)) + 1

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lwb/core/error.hpp"

namespace lwb {

using Natural = boost::multiprecision::cpp_int;

namespace codec {
/// A Gödel code.
using Code = Natural;
}  // namespace codec

inline Natural pair(const Natural& a, const Natural& b) {
  Natural s = a + b;
  return s * (s + 1) / 2 + b;
}

/// Inverse of pair(). Total on the naturals.
inline std::pair<Natural, Natural> unpair(const Natural& z) {
  // w = floor((sqrt(8z + 1) - 1) / 2)
  Natural w = (boost::multiprecision::sqrt(Natural(8 * z + 1)) - 1) / 2;
  Natural t = w * (w + 1) / 2;
  Natural b = z - t;
  return {w - b, b};
}

inline Natural encode_seq(const std::vector<Natural>& xs) {
  Natural acc = 0;
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) acc = pair(*it, acc) + 1;
  return acc;
}

/// Every natural decodes to exactly one finite sequence.
inline std::vector<Natural> decode_seq(Natural c) {
  std::vector<Natural> out;
  while (c != 0) {
    auto [head, rest] = unpair(c - 1);
    out.push_back(std::move(head));
    c = std::move(rest);
  }
  return out;
}

/// Narrowing that reports failure instead of wrapping.
inline std::optional<std::uint64_t> to_u64(const Natural& n) {
  if (n < 0 || n > Natural(std::numeric_limits<std::uint64_t>::max())) return std::nullopt;
  return static_cast<std::uint64_t>(n);
}

inline std::uint64_t require_u64(const Natural& n, const char* what) {
  auto v = to_u64(n);
  if (!v) throw MalformedCode(std::string(what) + " out of range");
  return *v;
}

inline std::string to_string(const Natural& n) { return n.str(); }

inline Natural parse_natural(const std::string& s) {
  if (s.empty()) throw ParseError("empty number");
  for (char ch : s)
    if (ch < '0' || ch > '9') throw ParseError("not a natural number: '" + s + "'");
  return Natural(s);
}

}  // namespace lwb
