#pragma once

// Frame validity: f holds at every point under every valuation of the
// variables that occur in it. Point sets are bitmasks, so one valuation
// costs one pass over the formula's subterm DAG.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lwb/codec/formula.hpp"
#include "lwb/codec/frame.hpp"
#include "lwb/core/error.hpp"

namespace lwb::kripke {

using codec::FiniteFrame;
using codec::Formula;
using codec::Mode;

/// Valuations are enumerated as an (n * v)-bit counter; refuse beyond this.
inline constexpr unsigned kMaxValuationBits = 24;

/// A valuation that falsifies f at `point`: one point mask per occurring
/// variable, in increasing variable order.
struct Countermodel {
  std::vector<std::uint64_t> vars;
  std::vector<std::uint64_t> masks;
  std::uint64_t point = 0;
};

namespace detail {

/// Subformula DAG in post-order; children precede parents.
class Compiled {
 public:
  explicit Compiled(const Formula& f) {
    auto vs = f.vars();
    vars_.assign(vs.begin(), vs.end());
    root_ = add(f);
  }

  const std::vector<std::uint64_t>& vars() const { return vars_; }

  /// Truth set of the root under `masks` (indexed like vars()).
  std::uint64_t eval(const FiniteFrame& F, const std::vector<std::uint64_t>& masks,
                     std::uint64_t all) const {
    std::vector<std::uint64_t> val(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      switch (n.kind) {
        case Formula::Kind::Var: val[i] = masks[n.a]; break;
        case Formula::Kind::Bottom: val[i] = 0; break;
        case Formula::Kind::And: val[i] = val[n.a] & val[n.b]; break;
        case Formula::Kind::Implies: val[i] = (~val[n.a] | val[n.b]) & all; break;
        case Formula::Kind::Box: {
          std::uint64_t out = 0;
          for (std::size_t x = 0; x < F.size(); ++x)
            if ((F.successors(x, n.b) & ~val[n.a]) == 0) out |= std::uint64_t{1} << x;
          val[i] = out;
          break;
        }
      }
    }
    return val[root_];
  }

 private:
  struct Node {
    Formula::Kind kind;
    std::size_t a = 0;
    std::size_t b = 0;
  };

  std::size_t add(const Formula& f) {
    if (auto it = ids_.find(f); it != ids_.end()) return it->second;
    Node n{f.kind()};
    switch (f.kind()) {
      case Formula::Kind::Var:
        n.a = static_cast<std::size_t>(
            std::lower_bound(vars_.begin(), vars_.end(), f.index()) - vars_.begin());
        break;
      case Formula::Kind::Bottom: break;
      case Formula::Kind::And:
      case Formula::Kind::Implies:
        n.a = add(f.lhs());
        n.b = add(f.rhs());
        break;
      case Formula::Kind::Box:
        n.a = add(f.body());
        n.b = f.slot();
        break;
    }
    nodes_.push_back(n);
    ids_.emplace(f, nodes_.size() - 1);
    return nodes_.size() - 1;
  }

  std::vector<Node> nodes_;
  std::map<Formula, std::size_t> ids_;
  std::vector<std::uint64_t> vars_;
  std::size_t root_ = 0;
};

}  // namespace detail

/// First valuation (in counter order) under which f fails at some point.
inline std::optional<Countermodel> falsifying_valuation(const FiniteFrame& F, const Formula& f) {
  if (F.mode() == Mode::Unimodal && f.uses_slot1())
    throw ModeMismatch("formula " + f.str() + " uses box1 on a unimodal frame");
  detail::Compiled c(f);
  const std::size_t n = F.size();
  const std::size_t v = c.vars().size();
  if (n * v > kMaxValuationBits)
    throw EnumerationTooLarge(std::to_string(n) + " points x " + std::to_string(v) +
                              " variables exceeds 2^" + std::to_string(kMaxValuationBits) +
                              " valuations");
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  const std::uint64_t total = std::uint64_t{1} << (n * v);
  std::vector<std::uint64_t> masks(v);
  for (std::uint64_t counter = 0; counter < total; ++counter) {
    for (std::size_t i = 0; i < v; ++i) masks[i] = (counter >> (i * n)) & all;
    const std::uint64_t truth = c.eval(F, masks, all);
    if (truth != all) {
      Countermodel cm{c.vars(), masks, 0};
      while ((truth >> cm.point) & 1U) ++cm.point;
      return cm;
    }
  }
  return std::nullopt;
}

inline bool validates(const FiniteFrame& F, const Formula& f) {
  return !falsifying_valuation(F, f).has_value();
}

/// The K axiom for the given box.
inline Formula k_axiom(unsigned slot = 0) {
  const Formula p = Formula::var(0), q = Formula::var(1);
  return Formula::implies(Formula::box(slot, Formula::implies(p, q)),
                          Formula::implies(Formula::box(slot, p), Formula::box(slot, q)));
}

/// p -> box_s ~box_(1-s) ~p
inline Formula tense_duality(unsigned slot) {
  const Formula p = Formula::var(0);
  return Formula::implies(
      p, Formula::box(slot, Formula::neg(Formula::box(1 - slot, Formula::neg(p)))));
}

}  // namespace lwb::kripke
