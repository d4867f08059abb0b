#pragma once

// Bounded proof search and the bounded pretabularity check.
//
// Search is forward chaining over a finite pool. The pool is built from the
// subformulas of the goal, the extra formula and the axioms (plus bottom):
// axiom-like lines are instances of the schemas with variables sent into
// that set, and tautology lines are drawn from it and from implications
// between its members. MP closes over what is known; Nec only produces
// pool members. Rounds stop at the length bound, so a proof of depth d is
// found after d rounds. The derivation recorded for each formula is the
// first one found, which keeps the output deterministic but not always
// shortest.

#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "lwb/core/parallel.hpp"
#include "lwb/hilbert/proof.hpp"

namespace lwb::hilbert {

struct SearchBounds {
  std::size_t length = 8;
  std::size_t formula_size = 16;
  /// Cap on axiom instances generated per schema.
  std::size_t instances = 20000;
};

struct Found {
  ProofObject proof;
};
struct Unknown {};
using SearchResult = std::variant<Found, Unknown>;

namespace detail {

class Searcher {
 public:
  Searcher(const ProofBase& base, const std::optional<Formula>& extra, const Formula& goal,
           const SearchBounds& bounds)
      : base_(base), extra_(extra), goal_(goal), bounds_(bounds) {}

  SearchResult run() {
    if (bounds_.length == 0 || bounds_.formula_size == 0) return Unknown{};
    if (!goal_.fits(base_.mode())) return Unknown{};
    seed();
    for (std::size_t round = 1; round <= bounds_.length; ++round) {
      if (auto p = try_goal()) return Found{std::move(*p)};
      if (!expand()) break;
    }
    if (auto p = try_goal()) return Found{std::move(*p)};
    return Unknown{};
  }

 private:
  struct Entry {
    Justification why;           // MP/Nec references are filled in on output
    std::vector<Formula> premises;  // MP: {major, minor}; Nec: {body}
  };

  void seed() {
    std::set<Formula> sub{Formula::bottom()};
    goal_.collect_subformulas(sub);
    if (extra_) extra_->collect_subformulas(sub);
    for (const auto& a : base_.axioms()) a.collect_subformulas(sub);
    std::erase_if(sub, [&](const Formula& f) { return !f.fits(base_.mode()); });
    atoms_.assign(sub.begin(), sub.end());

    std::set<Formula> pool(sub.begin(), sub.end());
    auto learn = [&](const Formula& f, Justification why) {
      if (f.size() > bounds_.formula_size) return;
      f.collect_subformulas(pool);
      known_.emplace(f, Entry{std::move(why), {}});
    };
    // Schemas in a fixed order: axioms, extra, K, duality.
    for (std::size_t i = 0; i < base_.axioms().size(); ++i)
      instances(base_.axioms()[i], [&](const Formula& f, const Substitution& s) {
        learn(f, Justification::axiom_instance(i, s));
      });
    if (extra_)
      instances(*extra_, [&](const Formula& f, const Substitution& s) {
        learn(f, Justification::extra(s));
      });
    const unsigned slots = base_.mode() == Mode::Tense ? 2 : 1;
    for (unsigned s = 0; s < slots; ++s)
      instances(kripke::k_axiom(s), [&](const Formula& f, const Substitution&) {
        learn(f, Justification::k(s));
      });
    if (base_.mode() == Mode::Tense)
      for (unsigned s = 0; s < 2; ++s)
        instances(kripke::tense_duality(s), [&](const Formula& f, const Substitution&) {
          learn(f, Justification::dual(s));
        });

    std::vector<Formula> base(pool.begin(), pool.end());
    for (const auto& a : base)
      for (const auto& b : base)
        if (a.size() + b.size() + 1 <= bounds_.formula_size) pool.insert(Formula::implies(a, b));
    for (const auto& f : pool) {
      if (known_.count(f)) continue;
      if (base_.contains(f))
        known_.emplace(f, Entry{Justification::in_base(), {}});
      else if (tautology_check(f))
        known_.emplace(f, Entry{Justification::tautology(), {}});
    }
    pool_ = std::move(pool);
  }

  template <typename Visit>
  void instances(const Formula& schema, Visit visit) {
    const auto vs = schema.vars();
    const std::vector<std::uint64_t> vars(vs.begin(), vs.end());
    Substitution s;
    std::size_t emitted = 0;
    std::function<void(std::size_t)> go = [&](std::size_t i) {
      if (emitted >= bounds_.instances) return;
      if (i == vars.size()) {
        ++emitted;
        Formula f = schema.substitute(s);
        // Identity substitutions are left implicit.
        Substitution shown;
        for (const auto& [v, g] : s)
          if (!(g.is_var() && g.index() == v)) shown.emplace(v, g);
        visit(f, shown);
        return;
      }
      for (const auto& a : atoms_) {
        s[vars[i]] = a;
        go(i + 1);
      }
      s.erase(vars[i]);
    };
    go(0);
  }

  /// One round of MP and Nec over a snapshot. False when nothing new.
  bool expand() {
    std::vector<std::pair<Formula, Entry>> fresh;
    std::set<Formula> seen;
    for (const auto& [f, e] : known_) {
      if (f.is_implies() && known_.count(f.lhs()) && !known_.count(f.rhs()) &&
          seen.insert(f.rhs()).second)
        fresh.push_back({f.rhs(), Entry{Justification::mp(0, 0), {f, f.lhs()}}});
      const unsigned slots = base_.mode() == Mode::Tense ? 2 : 1;
      for (unsigned s = 0; s < slots; ++s) {
        Formula boxed = Formula::box(s, f);
        if (pool_.count(boxed) && !known_.count(boxed) && seen.insert(boxed).second)
          fresh.push_back({boxed, Entry{Justification::nec(0, s), {f}}});
      }
    }
    for (auto& [f, e] : fresh) known_.emplace(std::move(f), std::move(e));
    return !fresh.empty();
  }

  std::optional<ProofObject> try_goal() const {
    if (!known_.count(goal_)) return std::nullopt;
    ProofObject out;
    std::map<Formula, std::size_t> line;
    std::function<std::size_t(const Formula&)> emit = [&](const Formula& f) -> std::size_t {
      if (auto it = line.find(f); it != line.end()) return it->second;
      const Entry& e = known_.at(f);
      Justification why = e.why;
      if (why.kind == Justification::Kind::MP) {
        why.major = emit(e.premises[0]);
        why.minor = emit(e.premises[1]);
      } else if (why.kind == Justification::Kind::Nec) {
        why.line = emit(e.premises[0]);
      }
      out.push_back({f, why});
      return line[f] = out.size();
    };
    emit(goal_);
    if (out.size() > bounds_.length) return std::nullopt;
    return out;
  }

  const ProofBase& base_;
  const std::optional<Formula>& extra_;
  const Formula& goal_;
  SearchBounds bounds_;
  std::vector<Formula> atoms_;
  std::set<Formula> pool_;
  std::map<Formula, Entry> known_;
};

}  // namespace detail

/// Looks for a proof of `goal` from `base` plus `extra`. Found proofs pass
/// check_proof; Unknown says nothing about provability.
inline SearchResult search_proof(const ProofBase& base, const std::optional<Formula>& extra,
                                 const Formula& goal, const SearchBounds& bounds = {}) {
  return detail::Searcher(base, extra, goal, bounds).run();
}

// Bounded pretabularity.

/// tab_n formulas by n, supplied from outside.
using TabTable = std::map<std::uint64_t, Formula>;

/// Which disjuncts were witnessed for one formula code phi_i:
/// phi_i is in L; L + phi_i proves some tab_n; L + phi_i proves bottom.
struct PretabEntry {
  Code code;
  Formula formula;
  bool in_logic = false;
  std::optional<std::uint64_t> tab;
  bool inconsistent = false;

  bool discharged() const { return in_logic || tab.has_value() || inconsistent; }
};

struct PretabReport {
  std::vector<PretabEntry> entries;
  /// Codes up to the bound that are not formula codes in this mode.
  std::vector<Code> skipped;
};

struct Consistent {
  PretabReport report;
};
struct Falsified {
  Code witness;
  PretabReport report;
};
using PretabVerdict = std::variant<Consistent, Falsified>;

struct PretabOptions {
  SearchBounds search;
  unsigned threads = 1;
};

inline PretabEntry pretab_entry(const ProofBase& base, const TabTable& tabs, const Code& code,
                                const Formula& f, const SearchBounds& bounds) {
  PretabEntry e;
  e.code = code;
  e.formula = f;
  e.in_logic = std::holds_alternative<Found>(search_proof(base, std::nullopt, f, bounds));
  for (const auto& [n, tab] : tabs)
    if (std::holds_alternative<Found>(search_proof(base, f, tab, bounds))) {
      e.tab = n;
      break;
    }
  e.inconsistent = std::holds_alternative<Found>(search_proof(base, f, Formula::bottom(), bounds));
  return e;
}

/// For every formula code i <= code_bound, tries each disjunct within the
/// search bounds. Falsified names the least code with none witnessed; that
/// is bounded evidence only.
inline PretabVerdict pretabular_bounded(const LogicPresentation& L, const TabTable& tabs,
                                        const Code& code_bound, const PretabOptions& opts = {}) {
  const ProofBase base = ProofBase::axiomatic(L);
  PretabReport report;
  std::vector<std::pair<Code, Formula>> todo;
  for (Code c = 0; c <= code_bound; ++c) {
    if (auto f = codec::try_decode_formula(c, L.mode))
      todo.emplace_back(c, std::move(*f));
    else
      report.skipped.push_back(c);
  }
  report.entries.resize(todo.size());
  parallel_for(todo.size(), opts.threads, [&](std::size_t i) {
    report.entries[i] = pretab_entry(base, tabs, todo[i].first, todo[i].second, opts.search);
  });
  for (const auto& e : report.entries)
    if (!e.discharged()) {
      Code w = e.code;
      return Falsified{w, std::move(report)};
    }
  return Consistent{std::move(report)};
}

}  // namespace lwb::hilbert
