#pragma once

// Bounded forward saturation of an equation set under reflexivity, symmetry,
// transitivity, replacement and substitution.
//
// Everything happens inside a finite universe U: the terms with at most
// `max_term_size` nodes over variables x_0 .. x_{V-1}. A rule application
// whose conclusion leaves U is dropped, so the result is the least set
// closed under the five rules *restricted to U*. That set grows with the
// budget and reaches the full equational theory only in the limit.
//
// Work proceeds as a FIFO given-equation loop: each newly derived equation
// is queued once; when it is dequeued it is combined with every previously
// dequeued equation by symmetry, transitivity, replacement and substitution,
// in that order. The queue order makes the output and every trace a pure
// function of the input.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "lwb/codec/term.hpp"
#include "lwb/core/error.hpp"

namespace lwb::eqlogic {

using codec::Equation;
using codec::Signature;
using codec::Term;

struct AxiomSet {
  Signature signature;
  std::vector<Equation> axioms;

  /// Sorts and deduplicates; throws SignatureMismatch on ill-formed axioms.
  static AxiomSet make(Signature sig, std::vector<Equation> axioms) {
    for (const auto& a : axioms)
      if (!a.well_formed(sig))
        throw SignatureMismatch("axiom " + a.str() + " does not fit signature [" + sig.str() +
                                "]");
    std::sort(axioms.begin(), axioms.end());
    axioms.erase(std::unique(axioms.begin(), axioms.end()), axioms.end());
    return {std::move(sig), std::move(axioms)};
  }
};

struct SaturationBudget {
  std::size_t max_term_size = 5;
  std::size_t max_vars = 2;
  /// Cap on dequeued given equations.
  std::size_t max_iterations = 1'000'000;
  /// Cap on |U|, guarding against signatures whose term count explodes.
  std::size_t max_universe = 200'000;

  void validate() const {
    if (max_term_size < 1 || max_vars < 1 || max_iterations < 1)
      throw Error("saturation budget bounds must be at least 1");
  }
};

enum class Rule : std::uint8_t {
  Axiom,
  Reflexivity,
  Symmetry,
  Transitivity,
  Replacement,
  Substitution
};

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Axiom: return "axiom";
    case Rule::Reflexivity: return "reflexivity";
    case Rule::Symmetry: return "symmetry";
    case Rule::Transitivity: return "transitivity";
    case Rule::Replacement: return "replacement";
    case Rule::Substitution: return "substitution";
  }
  return "?";
}

/// One rule application. For replacement the replaced-into term is
/// conclusion.left; for substitution `substitution[i]` is the image of x_i.
struct DerivationStep {
  Rule rule = Rule::Axiom;
  Equation conclusion;
  std::vector<Equation> premises;
  std::vector<Term> substitution;
};

struct SaturationResult {
  std::set<Equation> derived;
  bool exhausted = false;
  std::map<Equation, DerivationStep> traces;
  std::size_t iterations = 0;
  /// Effective bounds after widening for the axioms (and a derive target).
  std::size_t term_size_bound = 0;
  std::size_t var_bound = 0;

  bool contains(const Equation& e) const { return derived.count(e) != 0; }

  /// The steps leading to `e`, premises before conclusions, `e` last.
  std::vector<DerivationStep> derivation_of(const Equation& e) const {
    std::vector<DerivationStep> out;
    std::set<Equation> seen;
    collect(e, seen, out);
    return out;
  }

 private:
  void collect(const Equation& e, std::set<Equation>& seen,
               std::vector<DerivationStep>& out) const {
    if (!seen.insert(e).second) return;
    auto it = traces.find(e);
    if (it == traces.end()) throw Error("no trace for " + e.str());
    for (const auto& p : it->second.premises) collect(p, seen, out);
    out.push_back(it->second);
  }
};

/// All terms over `sig` with at most `max_size` nodes and variables below
/// `vars`, ordered by size then by term order.
inline std::vector<Term> enumerate_terms(const Signature& sig, std::size_t max_size,
                                         std::size_t vars, std::size_t ceiling = 200'000) {
  std::vector<std::vector<Term>> by_size(max_size + 1);
  auto guard = [&](std::size_t n) {
    if (n > ceiling)
      throw EnumerationTooLarge("term universe exceeds " + std::to_string(ceiling) + " terms");
  };
  std::size_t total = 0;
  for (std::size_t size = 1; size <= max_size; ++size) {
    auto& bucket = by_size[size];
    if (size == 1)
      for (std::size_t v = 0; v < vars; ++v) bucket.push_back(Term::var(v));
    for (std::size_t k = 0; k < sig.size(); ++k) {
      const unsigned arity = sig.arity(k);
      if (arity == 0) {
        if (size == 1) bucket.push_back(Term::app(k, {}));
        continue;
      }
      if (size < 1 + arity) continue;
      // Distribute size - 1 nodes over the arguments.
      std::vector<Term> args(arity);
      auto rec = [&](auto&& self, unsigned pos, std::size_t remaining) -> void {
        if (pos + 1 == arity) {
          if (remaining >= by_size.size()) return;
          for (const auto& t : by_size[remaining]) {
            args[pos] = t;
            bucket.push_back(Term::app(k, args));
            guard(total + bucket.size());
          }
          return;
        }
        for (std::size_t s = 1; s + (arity - pos - 1) <= remaining; ++s) {
          if (s >= by_size.size()) break;
          for (const auto& t : by_size[s]) {
            args[pos] = t;
            self(self, pos + 1, remaining - s);
          }
        }
      };
      rec(rec, 0, size - 1);
    }
    std::sort(bucket.begin(), bucket.end());
    total += bucket.size();
    guard(total);
  }
  std::vector<Term> out;
  out.reserve(total);
  for (auto& b : by_size)
    for (auto& t : b) out.push_back(std::move(t));
  return out;
}

namespace detail {

class Saturator {
 public:
  Saturator(const AxiomSet& ax, const SaturationBudget& budget,
            const std::optional<Equation>& target)
      : ax_(ax), budget_(budget) {
    budget.validate();
    size_bound_ = budget.max_term_size;
    var_bound_ = budget.max_vars;
    for (const auto& a : ax.axioms)
      var_bound_ = std::max<std::size_t>(var_bound_, a.var_bound());
    if (target) {
      if (!target->well_formed(ax.signature))
        throw SignatureMismatch("equation " + target->str() + " does not fit the signature");
      size_bound_ = std::max({size_bound_, target->left.size(), target->right.size()});
      var_bound_ = std::max<std::size_t>(var_bound_, target->var_bound());
    }
    terms_ = enumerate_terms(ax.signature, size_bound_, var_bound_, budget.max_universe);
    for (std::uint32_t i = 0; i < terms_.size(); ++i) {
      ids_.emplace(terms_[i], i);
      sizes_.push_back(terms_[i].size());
    }
    index_occurrences();
    by_lhs_.resize(terms_.size());
    by_rhs_.resize(terms_.size());
    if (target) target_ = key(id(target->left).value(), id(target->right).value());
  }

  SaturationResult run() {
    SaturationResult res;
    res.term_size_bound = size_bound_;
    res.var_bound = var_bound_;

    for (const auto& a : ax_.axioms) {
      auto l = id(a.left), r = id(a.right);
      if (l && r) add(*l, *r, {Rule::Axiom, a, {}, {}});
    }
    for (std::uint32_t t = 0; t < terms_.size(); ++t)
      add(t, t, {Rule::Reflexivity, {terms_[t], terms_[t]}, {}, {}});

    while (!queue_.empty() && !target_hit_) {
      if (res.iterations == budget_.max_iterations) break;
      auto [a, b] = queue_.front();
      queue_.pop_front();
      ++res.iterations;
      process(a, b);
    }
    res.exhausted = queue_.empty();
    for (auto& step : steps_) {
      res.derived.insert(step.conclusion);
      res.traces.emplace(step.conclusion, std::move(step));
    }
    return res;
  }

 private:
  using Path = std::vector<std::uint8_t>;
  static std::uint64_t key(std::uint32_t a, std::uint32_t b) {
    return (std::uint64_t{a} << 32) | b;
  }

  std::optional<std::uint32_t> id(const Term& t) const {
    auto it = ids_.find(t);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  Equation eq(std::uint32_t a, std::uint32_t b) const { return {terms_[a], terms_[b]}; }

  void index_occurrences() {
    occurrences_.resize(terms_.size());
    for (std::uint32_t t = 0; t < terms_.size(); ++t) {
      Path path;
      walk(t, terms_[t], path);
    }
  }

  void walk(std::uint32_t root, const Term& sub, Path& path) {
    // Every subterm of a term in U is itself in U.
    occurrences_[*id(sub)].push_back({root, path});
    for (std::size_t i = 0; i < sub.args().size(); ++i) {
      path.push_back(static_cast<std::uint8_t>(i));
      walk(root, sub.args()[i], path);
      path.pop_back();
    }
  }

  static Term replace_at(const Term& t, const Path& path, std::size_t depth, const Term& with) {
    if (depth == path.size()) return with;
    std::vector<Term> args = t.args();
    args[path[depth]] = replace_at(args[path[depth]], path, depth + 1, with);
    return Term::app(t.index(), std::move(args));
  }

  void add(std::uint32_t a, std::uint32_t b, DerivationStep step) {
    auto [it, inserted] = known_.emplace(key(a, b), steps_.size());
    if (!inserted) return;
    steps_.push_back(std::move(step));
    queue_.emplace_back(a, b);
    if (target_ && *target_ == key(a, b)) target_hit_ = true;
  }

  void process(std::uint32_t a, std::uint32_t b) {
    const Equation given = eq(a, b);
    by_lhs_[a].push_back(b);
    by_rhs_[b].push_back(a);

    add(b, a, {Rule::Symmetry, eq(b, a), {given}, {}});

    // (a = b), (b = c)  =>  a = c
    const std::vector<std::uint32_t> right = by_lhs_[b];
    for (std::uint32_t c : right) add(a, c, {Rule::Transitivity, eq(a, c), {given, eq(b, c)}, {}});
    // (z = a), (a = b)  =>  z = b
    const std::vector<std::uint32_t> left = by_rhs_[a];
    for (std::uint32_t z : left) add(z, b, {Rule::Transitivity, eq(z, b), {eq(z, a), given}, {}});

    // t = t[a := b] at each occurrence of a in some t of U
    for (const auto& [t, path] : occurrences_[a]) {
      Term replaced = replace_at(terms_[t], path, 0, terms_[b]);
      if (auto r = id(replaced)) add(t, *r, {Rule::Replacement, eq(t, *r), {given}, {}});
    }

    substitutions(a, b, given);
  }

  void substitutions(std::uint32_t a, std::uint32_t b, const Equation& given) {
    std::map<std::uint64_t, std::pair<std::size_t, std::size_t>> counts;
    count_vars(terms_[a], counts, true);
    count_vars(terms_[b], counts, false);
    std::vector<std::uint64_t> vars;
    std::vector<std::pair<std::size_t, std::size_t>> occ;
    for (auto& [v, c] : counts) {
      vars.push_back(v);
      occ.push_back(c);
    }
    if (vars.empty()) return;
    const std::size_t slack_l = size_bound_ - sizes_[a];
    const std::size_t slack_r = size_bound_ - sizes_[b];
    std::vector<Term> subst(var_bound_);
    for (std::size_t v = 0; v < var_bound_; ++v) subst[v] = Term::var(v);

    auto rec = [&](auto&& self, std::size_t i, std::size_t used_l, std::size_t used_r) -> void {
      if (i == vars.size()) {
        Equation inst = given.substitute(subst);
        auto l = id(inst.left), r = id(inst.right);
        if (l && r) add(*l, *r, {Rule::Substitution, inst, {given}, subst});
        return;
      }
      for (std::uint32_t u = 0; u < terms_.size(); ++u) {
        const std::size_t extra = sizes_[u] - 1;
        const std::size_t need_l = used_l + occ[i].first * extra;
        const std::size_t need_r = used_r + occ[i].second * extra;
        // terms_ is sorted by size, so nothing further fits either.
        if (need_l > slack_l || need_r > slack_r) break;
        subst[vars[i]] = terms_[u];
        self(self, i + 1, need_l, need_r);
      }
      subst[vars[i]] = Term::var(vars[i]);
    };
    rec(rec, 0, 0, 0);
  }

  static void count_vars(const Term& t,
                         std::map<std::uint64_t, std::pair<std::size_t, std::size_t>>& counts,
                         bool left) {
    if (t.is_var()) {
      auto& c = counts[t.index()];
      (left ? c.first : c.second) += 1;
      return;
    }
    for (const auto& a : t.args()) count_vars(a, counts, left);
  }

  const AxiomSet& ax_;
  SaturationBudget budget_;
  std::size_t size_bound_ = 0;
  std::size_t var_bound_ = 0;
  std::vector<Term> terms_;
  std::vector<std::size_t> sizes_;
  std::map<Term, std::uint32_t> ids_;
  std::vector<std::vector<std::pair<std::uint32_t, Path>>> occurrences_;
  std::vector<std::vector<std::uint32_t>> by_lhs_, by_rhs_;
  std::unordered_map<std::uint64_t, std::size_t> known_;
  std::vector<DerivationStep> steps_;
  std::deque<std::pair<std::uint32_t, std::uint32_t>> queue_;
  std::optional<std::uint64_t> target_;
  bool target_hit_ = false;
};

}  // namespace detail

inline SaturationResult saturate(const AxiomSet& ax, const SaturationBudget& budget) {
  return detail::Saturator(ax, budget, std::nullopt).run();
}

struct Derived {
  std::vector<DerivationStep> trace;
};
struct Unknown {};
using Derivability = std::variant<Derived, Unknown>;

/// Semi-decision: Derived comes with a replayable trace; Unknown makes no
/// claim. The budget is widened so that `e` itself lies inside the universe.
inline Derivability derives(const AxiomSet& ax, const Equation& e,
                            const SaturationBudget& budget) {
  auto res = detail::Saturator(ax, budget, e).run();
  if (!res.contains(e)) return Unknown{};
  return Derived{res.derivation_of(e)};
}

}  // namespace lwb::eqlogic
