#pragma once

// Finite Kripke frames and their codes.
//
//   code(F) = pair(n - 1, mask)   where bit (i * n + j) of mask is set iff i R j
//
// Raw frames are coded directly; canonical_frame_code() takes the minimum
// over all relabellings of the carrier, so isomorphic frames share it.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lwb/codec/formula.hpp"
#include "lwb/core/error.hpp"
#include "lwb/core/natural.hpp"

namespace lwb::codec {

inline constexpr std::size_t kMaxFramePoints = 64;

class FiniteFrame {
 public:
  FiniteFrame() : FiniteFrame(1) {}
  explicit FiniteFrame(std::size_t n, Mode mode = Mode::Unimodal)
      : n_(n), mode_(mode), succ_(n, 0), pred_(n, 0) {
    if (n == 0) throw Error("a frame needs at least one point");
    if (n > kMaxFramePoints)
      throw EnumerationTooLarge("frames are limited to " + std::to_string(kMaxFramePoints) +
                                " points");
  }

  FiniteFrame(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
              Mode mode = Mode::Unimodal)
      : FiniteFrame(n, mode) {
    for (auto [i, j] : edges) add_edge(i, j);
  }

  std::size_t size() const { return n_; }
  Mode mode() const { return mode_; }
  void set_mode(Mode m) { mode_ = m; }

  void add_edge(std::size_t i, std::size_t j) {
    if (i >= n_ || j >= n_) throw Error("edge out of range");
    succ_[i] |= std::uint64_t{1} << j;
    pred_[j] |= std::uint64_t{1} << i;
  }
  bool related(std::size_t i, std::size_t j) const { return (succ_[i] >> j) & 1U; }

  /// Successor set of x along box `slot`; slot 1 reads the converse relation.
  std::uint64_t successors(std::size_t x, unsigned slot = 0) const {
    return slot == 0 ? succ_[x] : pred_[x];
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (related(i, j)) out.emplace_back(i, j);
    return out;
  }

  /// Row-major relation mask; bit i*n+j.
  Natural mask() const {
    Natural m = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (related(i, j)) bit_set(m, static_cast<unsigned>(i * n_ + j));
    return m;
  }

  /// `{size: n, edges: [[i,j],...]}`
  std::string str() const {
    std::string out = "{size: " + std::to_string(n_) + ", edges: [";
    bool first = true;
    for (auto [i, j] : edges()) {
      if (!first) out += ", ";
      first = false;
      out += "[" + std::to_string(i) + "," + std::to_string(j) + "]";
    }
    return out + "]}";
  }

  /// Same frame with point p renamed to perm[p].
  FiniteFrame permuted(const std::vector<std::size_t>& perm) const {
    FiniteFrame g(n_, mode_);
    for (auto [i, j] : edges()) g.add_edge(perm[i], perm[j]);
    return g;
  }

  friend bool operator==(const FiniteFrame& a, const FiniteFrame& b) {
    return a.n_ == b.n_ && a.succ_ == b.succ_;
  }

 private:
  std::size_t n_;
  Mode mode_;
  std::vector<std::uint64_t> succ_;
  std::vector<std::uint64_t> pred_;
};

inline Code encode_frame(const FiniteFrame& f) { return pair(Natural(f.size() - 1), f.mask()); }

/// True iff c = pair(n - 1, mask) with mask < 2^(n^2). Does not build the frame.
inline bool is_frame_code(const Code& c) {
  if (c < 0) return false;
  auto [a, mask] = unpair(c);
  if (mask == 0) return true;
  // mask < 2^(n^2)  <=>  msb(mask) < n^2
  Natural n = a + 1;
  auto msb = boost::multiprecision::msb(mask);
  return Natural(msb) < n * n;
}

inline FiniteFrame decode_frame(const Code& c, Mode mode = Mode::Unimodal) {
  if (!is_frame_code(c)) throw MalformedCode("relation mask exceeds 2^(n^2)");
  auto [a, mask] = unpair(c);
  auto nm1 = to_u64(a);
  if (!nm1 || *nm1 + 1 > kMaxFramePoints)
    throw EnumerationTooLarge("frame code " + c.str() + " has more than " +
                              std::to_string(kMaxFramePoints) + " points");
  const std::size_t n = *nm1 + 1;
  FiniteFrame f(n, mode);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (bit_test(mask, static_cast<unsigned>(i * n + j))) f.add_edge(i, j);
  return f;
}

/// Relation mask of `f` relabelled by `perm`, as a 64-bit word. Only for
/// frames of at most 8 points.
inline std::uint64_t small_mask(const FiniteFrame& f, const std::vector<std::size_t>& perm) {
  const std::size_t n = f.size();
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (f.related(i, j)) m |= std::uint64_t{1} << (perm[i] * n + perm[j]);
  return m;
}

/// Minimum code over all carrier permutations. Factorial in the frame size.
inline Code canonical_frame_code(const FiniteFrame& f) {
  const std::size_t n = f.size();
  if (n > 8) throw EnumerationTooLarge("canonicalisation limited to 8 points");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t best = small_mask(f, perm);
  while (std::next_permutation(perm.begin(), perm.end()))
    best = std::min(best, small_mask(f, perm));
  return pair(Natural(n - 1), Natural(best));
}

inline FiniteFrame canonical_frame(const FiniteFrame& f) {
  FiniteFrame g = decode_frame(canonical_frame_code(f), f.mode());
  return g;
}

}  // namespace lwb::codec
