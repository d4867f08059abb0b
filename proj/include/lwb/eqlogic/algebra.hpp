#pragma once

// Finite algebras as a semantic oracle: enumeration of all operation tables
// of a given carrier size, equation checking, and counter-model search.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lwb/codec/term.hpp"
#include "lwb/core/error.hpp"
#include "lwb/eqlogic/saturate.hpp"

namespace lwb::eqlogic {

/// Default cap on the number of operation-table combinations one
/// enumeration may visit (per carrier size).
inline constexpr std::uint64_t kDefaultAlgebraCeiling = std::uint64_t{1} << 24;

class FiniteAlgebra {
 public:
  FiniteAlgebra(Signature sig, std::uint32_t carrier) : sig_(std::move(sig)), k_(carrier) {
    if (carrier < 1) throw Error("carrier size must be at least 1");
    for (std::size_t s = 0; s < sig_.size(); ++s)
      tables_.emplace_back(table_size(s), 0);
  }

  const Signature& signature() const { return sig_; }
  std::uint32_t size() const { return k_; }

  /// Entries of symbol s, indexed by arguments read as a base-k numeral with
  /// the first argument most significant.
  const std::vector<std::uint32_t>& table(std::size_t s) const { return tables_.at(s); }
  std::vector<std::uint32_t>& table(std::size_t s) { return tables_.at(s); }

  std::size_t table_size(std::size_t s) const {
    std::size_t n = 1;
    for (unsigned i = 0; i < sig_.arity(s); ++i) n *= k_;
    return n;
  }

  std::uint32_t apply(std::size_t s, const std::uint32_t* args) const {
    std::size_t idx = 0;
    for (unsigned i = 0; i < sig_.arity(s); ++i) idx = idx * k_ + args[i];
    return tables_[s][idx];
  }

  /// `assignment[i]` is the value of x_i.
  std::uint32_t eval(const Term& t, const std::vector<std::uint32_t>& assignment) const {
    if (t.is_var()) return assignment.at(t.index());
    std::uint32_t buf[8];
    std::vector<std::uint32_t> big;
    std::uint32_t* args = buf;
    if (t.args().size() > 8) {
      big.resize(t.args().size());
      args = big.data();
    }
    for (std::size_t i = 0; i < t.args().size(); ++i) args[i] = eval(t.args()[i], assignment);
    return apply(t.index(), args);
  }

  std::string str() const {
    std::string out = "carrier " + std::to_string(k_);
    for (std::size_t s = 0; s < sig_.size(); ++s) {
      out += "; f" + std::to_string(s) + ":";
      for (auto v : tables_[s]) out += " " + std::to_string(v);
    }
    return out;
  }

  friend bool operator==(const FiniteAlgebra&, const FiniteAlgebra&) = default;

 private:
  Signature sig_;
  std::uint32_t k_;
  std::vector<std::vector<std::uint32_t>> tables_;
};

/// Number of algebras of carrier size k, or nullopt past 2^64.
inline std::optional<std::uint64_t> algebra_count(const Signature& sig, std::uint32_t k) {
  Natural cells = 0;
  for (std::size_t s = 0; s < sig.size(); ++s) {
    Natural n = 1;
    for (unsigned i = 0; i < sig.arity(s); ++i) n *= k;
    cells += n;
  }
  if (cells > 64) return k == 1 ? std::optional<std::uint64_t>(1) : std::nullopt;
  Natural total = boost::multiprecision::pow(Natural(k), static_cast<unsigned>(cells));
  return to_u64(total);
}

/// Visits every algebra of carrier size k once, in lexicographic order of the
/// concatenated tables (symbol 0 first, last cell fastest). Stops early when
/// `visit` returns false.
inline void enumerate_algebras(const Signature& sig, std::uint32_t k,
                               const std::function<bool(const FiniteAlgebra&)>& visit,
                               std::uint64_t ceiling = kDefaultAlgebraCeiling) {
  auto count = algebra_count(sig, k);
  if (!count || *count > ceiling)
    throw EnumerationTooLarge("algebras of size " + std::to_string(k) + " exceed ceiling " +
                              std::to_string(ceiling));
  FiniteAlgebra alg(sig, k);
  std::vector<std::uint32_t*> cells;
  for (std::size_t s = 0; s < sig.size(); ++s)
    for (auto& c : alg.table(s)) cells.push_back(&c);
  while (true) {
    if (!visit(alg)) return;
    std::size_t i = cells.size();
    while (i > 0) {
      --i;
      if (++*cells[i] < k) break;
      *cells[i] = 0;
      if (i == 0) return;
    }
    if (cells.empty()) return;
  }
}

inline std::vector<FiniteAlgebra> all_algebras(const Signature& sig, std::uint32_t k,
                                               std::uint64_t ceiling = kDefaultAlgebraCeiling) {
  std::vector<FiniteAlgebra> out;
  enumerate_algebras(
      sig, k,
      [&](const FiniteAlgebra& a) {
        out.push_back(a);
        return true;
      },
      ceiling);
  return out;
}

/// First assignment (x_0 most significant) under which e fails, if any.
inline std::optional<std::vector<std::uint32_t>> falsifying_assignment(const FiniteAlgebra& alg,
                                                                       const Equation& e) {
  if (!e.well_formed(alg.signature()))
    throw SignatureMismatch("equation " + e.str() + " does not fit the algebra's signature");
  std::set<std::uint64_t> vs;
  e.left.collect_vars(vs);
  e.right.collect_vars(vs);
  std::vector<std::uint64_t> vars(vs.begin(), vs.end());
  std::vector<std::uint32_t> assignment(e.var_bound(), 0);
  while (true) {
    if (alg.eval(e.left, assignment) != alg.eval(e.right, assignment)) return assignment;
    std::size_t i = vars.size();
    while (i > 0) {
      --i;
      if (++assignment[vars[i]] < alg.size()) break;
      assignment[vars[i]] = 0;
      if (i == 0) return std::nullopt;
    }
    if (vars.empty()) return std::nullopt;
  }
}

inline bool holds_in(const FiniteAlgebra& alg, const Equation& e) {
  return !falsifying_assignment(alg, e).has_value();
}

struct CounterModel {
  FiniteAlgebra algebra;
  std::vector<std::uint32_t> assignment;
};
using Refutation = std::variant<CounterModel, Unknown>;

/// Searches carrier sizes 1..max_size in order for an algebra satisfying
/// every axiom but not e.
inline Refutation refutes(const AxiomSet& ax, const Equation& e, std::uint32_t max_size,
                          std::uint64_t ceiling = kDefaultAlgebraCeiling) {
  if (max_size < 1) throw Error("max algebra size must be at least 1");
  if (!e.well_formed(ax.signature))
    throw SignatureMismatch("equation " + e.str() + " does not fit the signature");
  for (std::uint32_t k = 1; k <= max_size; ++k) {
    auto count = algebra_count(ax.signature, k);
    if (!count || *count > ceiling)
      throw EnumerationTooLarge("algebras of size " + std::to_string(k) + " exceed ceiling " +
                                std::to_string(ceiling));
  }
  std::optional<CounterModel> found;
  for (std::uint32_t k = 1; k <= max_size && !found; ++k) {
    enumerate_algebras(
        ax.signature, k,
        [&](const FiniteAlgebra& alg) {
          for (const auto& a : ax.axioms)
            if (!holds_in(alg, a)) return true;
          if (auto bad = falsifying_assignment(alg, e)) {
            found = CounterModel{alg, std::move(*bad)};
            return false;
          }
          return true;
        },
        ceiling);
  }
  if (found) return std::move(*found);
  return Unknown{};
}

}  // namespace lwb::eqlogic
