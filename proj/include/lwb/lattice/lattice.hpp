#pragma once

// Finite lattices and the downset lattice of a finite poset.
//
// A downset of a poset is a down-closed subset; ordered by inclusion, the
// downsets form a distributive lattice with union as join and intersection
// as meet. For a chain the downsets are its prefixes, so the lattice is
// itself a chain.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lwb/core/error.hpp"

namespace lwb::lattice {

/// Posets are held as bitmasks, so at most this many points.
inline constexpr std::size_t kMaxPosetPoints = 24;
/// Triple enumeration cap for check_distributive.
inline constexpr std::size_t kMaxTripleElements = 400;

using Mask = std::uint32_t;

/// Order on {0, ..., n-1}: below[x] has bit y set iff y <= x.
class FinitePoset {
 public:
  /// `covers` lists pairs (x, y) with x < y; the reflexive-transitive
  /// closure is taken. Throws on cycles.
  FinitePoset(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& covers)
      : below_(n) {
    if (n > kMaxPosetPoints)
      throw EnumerationTooLarge("poset of " + std::to_string(n) + " points (max " +
                                std::to_string(kMaxPosetPoints) + ")");
    for (std::size_t x = 0; x < n; ++x) below_[x] = Mask{1} << x;
    for (auto [x, y] : covers) {
      if (x >= n || y >= n) throw Error("order pair out of range");
      below_[y] |= Mask{1} << x;
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          if ((below_[x] >> y & 1) && (below_[x] | below_[y]) != below_[x]) {
            below_[x] |= below_[y];
            changed = true;
          }
    }
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (x != y && (below_[x] >> y & 1) && (below_[y] >> x & 1))
          throw Error("order relation has a cycle");
  }

  static FinitePoset chain(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> covers;
    for (std::size_t i = 1; i < n; ++i) covers.emplace_back(i - 1, i);
    return FinitePoset(n, covers);
  }
  static FinitePoset antichain(std::size_t n) { return FinitePoset(n, {}); }

  std::size_t size() const { return below_.size(); }
  bool leq(std::size_t x, std::size_t y) const { return below_[y] >> x & 1; }
  /// The principal downset of x.
  Mask principal(std::size_t x) const { return below_.at(x); }
  bool is_downset(Mask d) const {
    for (std::size_t x = 0; x < size(); ++x)
      if ((d >> x & 1) && (below_[x] & ~d)) return false;
    return true;
  }

 private:
  std::vector<Mask> below_;
};

/// A lattice on {0, ..., n-1} given by its meet and join tables.
class FiniteLattice {
 public:
  /// Builds meet and join from a partial order; throws if some pair lacks
  /// a greatest lower or least upper bound.
  static FiniteLattice from_order(std::vector<std::string> names, const FinitePoset& order) {
    const std::size_t n = order.size();
    if (names.size() != n) throw Error("lattice needs one name per element");
    FiniteLattice L;
    L.names_ = std::move(names);
    L.meet_.assign(n, std::vector<std::size_t>(n));
    L.join_.assign(n, std::vector<std::size_t>(n));
    auto bound = [&](std::size_t a, std::size_t b, bool lower) -> std::size_t {
      std::optional<std::size_t> best;
      for (std::size_t c = 0; c < n; ++c) {
        const bool ok = lower ? order.leq(c, a) && order.leq(c, b) : order.leq(a, c) && order.leq(b, c);
        if (!ok) continue;
        if (!best || (lower ? order.leq(*best, c) : order.leq(c, *best))) best = c;
      }
      // The candidate must dominate every other bound.
      for (std::size_t c = 0; best && c < n; ++c) {
        const bool ok = lower ? order.leq(c, a) && order.leq(c, b) : order.leq(a, c) && order.leq(b, c);
        if (ok && !(lower ? order.leq(c, *best) : order.leq(*best, c))) best.reset();
      }
      if (!best)
        throw Error("elements " + L.names_[a] + " and " + L.names_[b] + " have no " +
                    (lower ? "meet" : "join"));
      return *best;
    };
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        L.meet_[a][b] = bound(a, b, true);
        L.join_[a][b] = bound(a, b, false);
      }
    return L;
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t a) const { return names_.at(a); }
  std::size_t meet(std::size_t a, std::size_t b) const { return meet_[a][b]; }
  std::size_t join(std::size_t a, std::size_t b) const { return join_[a][b]; }
  bool leq(std::size_t a, std::size_t b) const { return meet_[a][b] == a; }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::size_t>> meet_, join_;
};

/// Downsets of a poset, sorted by size and then by mask.
class DownsetLattice {
 public:
  explicit DownsetLattice(const FinitePoset& poset) : poset_(poset) {
    const std::size_t n = poset.size();
    for (std::uint64_t d = 0; d < (std::uint64_t{1} << n); ++d)
      if (poset.is_downset(static_cast<Mask>(d))) elements_.push_back(static_cast<Mask>(d));
    std::stable_sort(elements_.begin(), elements_.end(), [](Mask a, Mask b) {
      return std::popcount(a) < std::popcount(b);
    });
  }

  const FinitePoset& poset() const { return poset_; }
  const std::vector<Mask>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  std::size_t index_of(Mask d) const {
    auto it = std::find(elements_.begin(), elements_.end(), d);
    if (it == elements_.end()) throw Error("not a downset of this poset");
    return static_cast<std::size_t>(it - elements_.begin());
  }

  /// The same lattice as meet/join tables, computed from the inclusion
  /// order alone.
  FiniteLattice as_lattice() const {
    std::vector<std::string> names;
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t a = 0; a < size(); ++a) {
      names.push_back(downset_str(elements_[a]));
      for (std::size_t b = 0; b < size(); ++b)
        if (a != b && (elements_[a] & ~elements_[b]) == 0) order.emplace_back(a, b);
    }
    if (size() > kMaxPosetPoints)
      throw EnumerationTooLarge("downset lattice of " + std::to_string(size()) + " elements");
    return FiniteLattice::from_order(std::move(names), FinitePoset(size(), order));
  }

  static std::string downset_str(Mask d) {
    std::string out = "{";
    for (std::size_t x = 0; x < 32; ++x)
      if (d >> x & 1) out += (out.size() > 1 ? "," : "") + std::to_string(x);
    return out + "}";
  }

 private:
  FinitePoset poset_;
  std::vector<Mask> elements_;
};

inline DownsetLattice downset_lattice(std::size_t chain_size) {
  return DownsetLattice(FinitePoset::chain(chain_size));
}

/// Some pair of downsets neither of which includes the other.
inline std::optional<std::pair<Mask, Mask>> exists_incomparable_pair(const DownsetLattice& lat) {
  const auto& e = lat.elements();
  for (std::size_t a = 0; a < e.size(); ++a)
    for (std::size_t b = a + 1; b < e.size(); ++b)
      if ((e[a] & ~e[b]) && (e[b] & ~e[a])) return std::pair{e[a], e[b]};
  return std::nullopt;
}

/// a meet (b join c) = (a meet b) join (a meet c) for every triple.
inline bool check_distributive(const FiniteLattice& L) {
  if (L.size() > kMaxTripleElements)
    throw EnumerationTooLarge("distributivity check over " + std::to_string(L.size()) +
                              " elements (max " + std::to_string(kMaxTripleElements) + ")");
  for (std::size_t a = 0; a < L.size(); ++a)
    for (std::size_t b = 0; b < L.size(); ++b)
      for (std::size_t c = 0; c < L.size(); ++c)
        if (L.meet(a, L.join(b, c)) != L.join(L.meet(a, b), L.meet(a, c))) return false;
  return true;
}

/// On downsets, with union as join and intersection as meet.
inline bool check_distributive(const DownsetLattice& lat) {
  if (lat.size() > kMaxTripleElements)
    throw EnumerationTooLarge("distributivity check over " + std::to_string(lat.size()) +
                              " elements (max " + std::to_string(kMaxTripleElements) + ")");
  for (Mask a : lat.elements())
    for (Mask b : lat.elements())
      for (Mask c : lat.elements())
        if ((a & (b | c)) != ((a & b) | (a & c))) return false;
  return true;
}

/// Covering families are enumerated exhaustively up to this many lattice
/// elements, and only up to size 2 beyond.
inline constexpr std::size_t kMaxExhaustiveFamilies = 16;

struct CompactnessReport {
  std::size_t chain_size = 0;
  std::size_t elements = 0;
  bool chain = false;
  bool distributive = false;
  /// Meet is intersection and join is union on every pair, with meet and
  /// join recomputed from the inclusion order.
  bool lattice_ops_agree = false;
  /// D is the union of the principal downsets of its points, for every D.
  std::size_t unions_checked = 0;
  std::size_t union_failures = 0;
  /// Families of downsets whose union contains a principal downset.
  bool exhaustive_families = false;
  std::size_t covers_checked = 0;
  std::size_t compactness_failures = 0;

  bool ok() const {
    return chain && distributive && lattice_ops_agree && union_failures == 0 &&
           compactness_failures == 0;
  }
};

inline CompactnessReport principal_downset_compactness_demo(std::size_t chain_size) {
  const DownsetLattice lat = downset_lattice(chain_size);
  const FinitePoset& P = lat.poset();
  const auto& e = lat.elements();
  CompactnessReport r;
  r.chain_size = chain_size;
  r.elements = e.size();
  r.chain = !exists_incomparable_pair(lat);
  r.distributive = check_distributive(lat);

  const FiniteLattice L = lat.as_lattice();
  r.lattice_ops_agree = true;
  for (std::size_t a = 0; a < e.size(); ++a)
    for (std::size_t b = 0; b < e.size(); ++b)
      if (e[L.meet(a, b)] != (e[a] & e[b]) || e[L.join(a, b)] != (e[a] | e[b]))
        r.lattice_ops_agree = false;

  for (Mask d : e) {
    Mask u = 0;
    for (std::size_t q = 0; q < P.size(); ++q)
      if (d >> q & 1) u |= P.principal(q);
    ++r.unions_checked;
    if (u != d) ++r.union_failures;
  }

  r.exhaustive_families = e.size() <= kMaxExhaustiveFamilies;
  auto check_family = [&](const std::vector<Mask>& family) {
    Mask u = 0;
    for (Mask m : family) u |= m;
    for (std::size_t q = 0; q < P.size(); ++q) {
      const Mask pq = P.principal(q);
      if ((pq & ~u) != 0) continue;
      ++r.covers_checked;
      const bool single = std::any_of(family.begin(), family.end(),
                                      [&](Mask m) { return (pq & ~m) == 0; });
      if (!single) ++r.compactness_failures;
    }
  };
  if (r.exhaustive_families) {
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << e.size()); ++s) {
      std::vector<Mask> family;
      for (std::size_t i = 0; i < e.size(); ++i)
        if (s >> i & 1) family.push_back(e[i]);
      check_family(family);
    }
  } else {
    for (std::size_t a = 0; a < e.size(); ++a)
      for (std::size_t b = a; b < e.size(); ++b) check_family({e[a], e[b]});
  }
  return r;
}

}  // namespace lwb::lattice
