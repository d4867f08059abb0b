#pragma once

// Frames up to isomorphism, the finite frames of a finitely axiomatised
// logic, and bounded comparison of two logics by their finite frames.
//
// A frame is canonical when its relation mask is the numeric minimum over
// all relabellings of its points. Canonical frames are listed in increasing
// order of their code pair(n - 1, mask), so sizes interleave.

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lwb/codec/frame.hpp"
#include "lwb/core/parallel.hpp"
#include "lwb/kripke/validity.hpp"

namespace lwb::kripke {

inline constexpr std::size_t kDefaultFrameCeiling = 5;
/// Masks are 64-bit words, so n^2 <= 64.
inline constexpr std::size_t kMaxEnumerablePoints = 8;

struct EnumerationOptions {
  std::size_t ceiling = kDefaultFrameCeiling;
  unsigned threads = 1;
};

/// Extra axioms on top of K (or the minimal tense logic, whose duality
/// axioms hold on every tense frame and need no checking).
struct LogicPresentation {
  Mode mode = Mode::Unimodal;
  std::vector<Formula> axioms;

  void validate() const {
    for (const auto& a : axioms)
      if (!a.fits(mode))
        throw ModeMismatch("axiom " + a.str() + " uses box1 in a unimodal logic");
  }

  bool validated_by(const FiniteFrame& F) const {
    for (const auto& a : axioms)
      if (!validates(F, a)) return false;
    return true;
  }

  std::string str() const {
    std::string out = mode == Mode::Tense ? "Kt" : "K";
    for (const auto& a : axioms) out += " + " + a.str();
    return out;
  }
};

namespace detail {

/// For each non-identity relabelling, the source bit of every target bit,
/// most significant first.
inline std::vector<std::vector<unsigned char>> relabelling_tables(std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<unsigned char>> tables;
  while (std::next_permutation(perm.begin(), perm.end())) {
    std::vector<unsigned char> src(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) src[perm[i] * n + perm[j]] = static_cast<unsigned char>(i * n + j);
    std::vector<unsigned char> msb_first(src.rbegin(), src.rend());
    tables.push_back(std::move(msb_first));
  }
  return tables;
}

inline bool is_canonical(std::uint64_t mask, std::size_t bits,
                         const std::vector<std::vector<unsigned char>>& tables) {
  for (const auto& t : tables) {
    for (std::size_t k = 0; k < bits; ++k) {
      const unsigned pos = static_cast<unsigned>(bits - 1 - k);
      const unsigned mine = (mask >> pos) & 1U;
      const unsigned theirs = (mask >> t[k]) & 1U;
      if (theirs < mine) return false;
      if (theirs > mine) break;
    }
  }
  return true;
}

}  // namespace detail

/// Canonical relation masks on n points, increasing.
inline std::vector<std::uint64_t> canonical_masks(std::size_t n, unsigned threads = 1) {
  if (n == 0 || n > kMaxEnumerablePoints)
    throw EnumerationTooLarge("frames of " + std::to_string(n) + " points");
  const std::size_t bits = n * n;
  const auto tables = detail::relabelling_tables(n);
  const std::uint64_t total = bits == 64 ? 0 : std::uint64_t{1} << bits;
  if (total == 0) throw EnumerationTooLarge("2^64 relations");
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::uint64_t>(total, 256));
  std::vector<std::vector<std::uint64_t>> found(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t lo = total / chunks * c + std::min<std::uint64_t>(c, total % chunks);
    const std::uint64_t hi = lo + total / chunks + (c < total % chunks ? 1 : 0);
    for (std::uint64_t m = lo; m < hi; ++m)
      if (detail::is_canonical(m, bits, tables)) found[c].push_back(m);
  });
  std::vector<std::uint64_t> out;
  for (auto& f : found) out.insert(out.end(), f.begin(), f.end());
  return out;
}

/// One frame per isomorphism class with 1..max_size points, ordered by code.
inline std::vector<FiniteFrame> enumerate_frames(std::size_t max_size, Mode mode = Mode::Unimodal,
                                                 const EnumerationOptions& opts = {}) {
  if (max_size > opts.ceiling || max_size > kMaxEnumerablePoints)
    throw EnumerationTooLarge("frame size " + std::to_string(max_size) + " exceeds ceiling " +
                              std::to_string(std::min(opts.ceiling, kMaxEnumerablePoints)));
  std::vector<std::pair<codec::Code, FiniteFrame>> all;
  for (std::size_t n = 1; n <= max_size; ++n)
    for (std::uint64_t m : canonical_masks(n, opts.threads)) {
      FiniteFrame f(n, mode);
      for (std::size_t b = 0; b < n * n; ++b)
        if ((m >> b) & 1U) f.add_edge(b / n, b % n);
      all.emplace_back(pair(Natural(n - 1), Natural(m)), std::move(f));
    }
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<FiniteFrame> out;
  out.reserve(all.size());
  for (auto& [code, f] : all) out.push_back(std::move(f));
  return out;
}

/// Canonical frames of size <= max_size validating every axiom of L.
inline std::vector<FiniteFrame> finite_frames_of(const LogicPresentation& L, std::size_t max_size,
                                                 const EnumerationOptions& opts = {}) {
  L.validate();
  auto frames = enumerate_frames(max_size, L.mode, opts);
  std::vector<char> keep(frames.size());
  parallel_for(frames.size(), opts.threads,
               [&](std::size_t i) { keep[i] = L.validated_by(frames[i]); });
  std::vector<FiniteFrame> out;
  for (std::size_t i = 0; i < frames.size(); ++i)
    if (keep[i]) out.push_back(std::move(frames[i]));
  return out;
}

enum class Side { LeftOnly, RightOnly };

inline const char* side_name(Side s) {
  return s == Side::LeftOnly ? "validates-left-only" : "validates-right-only";
}

struct EqualUpTo {
  std::size_t bound;
};
struct Distinguished {
  FiniteFrame frame;
  Side side;
};
using FmpVerdict = std::variant<EqualUpTo, Distinguished>;

/// Compares the finite frames of L1 and L2 up to max_size points. The
/// witness is the first distinguishing frame in canonical order.
inline FmpVerdict fmp_equal_bounded(const LogicPresentation& L1, const LogicPresentation& L2,
                                    std::size_t max_size, const EnumerationOptions& opts = {}) {
  if (L1.mode != L2.mode)
    throw ModeMismatch(std::string("comparing a ") + codec::mode_name(L1.mode) + " logic with a " +
                       codec::mode_name(L2.mode) + " one");
  L1.validate();
  L2.validate();
  const auto frames = enumerate_frames(max_size, L1.mode, opts);
  std::vector<signed char> verdict(frames.size());
  parallel_for(frames.size(), opts.threads, [&](std::size_t i) {
    const bool a = L1.validated_by(frames[i]);
    const bool b = L2.validated_by(frames[i]);
    verdict[i] = a == b ? 0 : (a ? 1 : -1);
  });
  for (std::size_t i = 0; i < frames.size(); ++i)
    if (verdict[i] != 0) return Distinguished{frames[i], verdict[i] > 0 ? Side::LeftOnly : Side::RightOnly};
  return EqualUpTo{max_size};
}

}  // namespace lwb::kripke
