#include <gtest/gtest.h>

#include <random>
#include <set>

#include "lwb/codec.hpp"
#include "lwb/eqlogic/algebra.hpp"
#include "lwb/eqlogic/saturate.hpp"
#include "test_support.hpp"

namespace lwb::eqlogic {
namespace {

using codec::app;
using codec::var;

const Signature kBin({2});
const Signature kUnary({1});

Term mul(Term a, Term b) { return app(0, {std::move(a), std::move(b)}); }
Equation commutativity() { return {mul(var(0), var(1)), mul(var(1), var(0))}; }
Equation associativity() {
  return {mul(mul(var(0), var(1)), var(2)), mul(var(0), mul(var(1), var(2)))};
}

/// Closure by whole-set rounds, applying all five rules to everything until
/// nothing changes. Shares no code with the saturator.
std::set<Equation> naive_closure(const std::vector<Equation>& axioms, const Signature& sig,
                                 std::size_t max_size, std::size_t vars) {
  const auto universe = testing::terms_up_to(sig, max_size, vars);
  const std::set<Term> in_u(universe.begin(), universe.end());
  auto inside = [&](const Equation& e) { return in_u.count(e.left) && in_u.count(e.right); };
  std::set<Equation> d;
  for (const auto& a : axioms)
    if (inside(a)) d.insert(a);
  for (const auto& t : universe) d.insert({t, t});
  while (true) {
    std::set<Equation> next = d;
    for (const auto& e : d) {
      next.insert(e.flipped());
      for (const auto& f : d)
        if (e.right == f.left) next.insert({e.left, f.right});
      for (const auto& t : universe)
        for (const auto& r : testing::replacement_oracle(t, e.left, e.right))
          if (in_u.count(r)) next.insert({t, r});
      std::set<std::uint64_t> vs;
      e.left.collect_vars(vs);
      e.right.collect_vars(vs);
      std::vector<std::uint64_t> evars(vs.begin(), vs.end());
      std::vector<Term> subst;
      for (std::size_t v = 0; v < vars; ++v) subst.push_back(var(v));
      std::function<void(std::size_t)> go = [&](std::size_t i) {
        if (i == evars.size()) {
          Equation inst = e.substitute(subst);
          if (inside(inst)) next.insert(inst);
          return;
        }
        for (const auto& t : universe) {
          subst[evars[i]] = t;
          go(i + 1);
        }
        subst[evars[i]] = var(evars[i]);
      };
      go(0);
    }
    if (next == d) return d;
    d = std::move(next);
  }
}

/// Re-checks one derivation step from its premises alone.
bool step_is_valid(const DerivationStep& s, const AxiomSet& ax) {
  const auto& c = s.conclusion;
  switch (s.rule) {
    case Rule::Axiom:
      return s.premises.empty() &&
             std::find(ax.axioms.begin(), ax.axioms.end(), c) != ax.axioms.end();
    case Rule::Reflexivity:
      return s.premises.empty() && c.left == c.right;
    case Rule::Symmetry:
      return s.premises.size() == 1 && s.premises[0] == c.flipped();
    case Rule::Transitivity:
      return s.premises.size() == 2 && s.premises[0].right == s.premises[1].left &&
             s.premises[0].left == c.left && s.premises[1].right == c.right;
    case Rule::Replacement:
      return s.premises.size() == 1 &&
             testing::replacement_oracle(c.left, s.premises[0].left, s.premises[0].right)
                 .count(c.right);
    case Rule::Substitution:
      return s.premises.size() == 1 && s.premises[0].substitute(s.substitution) == c;
  }
  return false;
}

TEST(Saturate, CommutativityExamples) {
  auto ax = AxiomSet::make(kBin, {commutativity()});
  auto res = saturate(ax, {3, 2, 100000});
  EXPECT_TRUE(res.exhausted);
  EXPECT_TRUE(res.contains({mul(var(1), var(0)), mul(var(0), var(1))}));
  EXPECT_TRUE(res.contains({mul(var(0), var(0)), mul(var(0), var(0))}));

  auto res5 = saturate(ax, {5, 2, 100000});
  EXPECT_TRUE(res5.contains({mul(mul(var(0), var(1)), var(0)), mul(mul(var(1), var(0)), var(0))}));
}

TEST(Saturate, MatchesNaiveFixpoint) {
  struct Case {
    std::vector<Equation> axioms;
    Signature sig;
    std::size_t size, vars;
  };
  const std::vector<Case> cases = {
      {{commutativity()}, kBin, 3, 2},
      {{commutativity()}, kBin, 5, 2},
      {{}, kBin, 5, 2},
      {{{mul(var(0), var(0)), var(0)}}, kBin, 5, 2},
      {{{app(0, {var(0)}), var(0)}}, kUnary, 4, 2},
      {{{var(0), var(1)}}, kUnary, 3, 2},
      {{{mul(var(0), var(1)), var(0)}}, kBin, 5, 2},
  };
  for (const auto& c : cases) {
    auto ax = AxiomSet::make(c.sig, c.axioms);
    auto res = saturate(ax, {c.size, c.vars, 10'000'000});
    ASSERT_TRUE(res.exhausted);
    EXPECT_EQ(res.derived, naive_closure(ax.axioms, c.sig, c.size, c.vars))
        << (c.axioms.empty() ? "{}" : c.axioms[0].str()) << " size " << c.size;
  }
}

TEST(Saturate, TracesReplay) {
  auto ax = AxiomSet::make(kBin, {commutativity(), {mul(var(0), var(0)), var(0)}});
  auto res = saturate(ax, {5, 2, 1'000'000});
  ASSERT_EQ(res.traces.size(), res.derived.size());
  for (const auto& [e, step] : res.traces) {
    EXPECT_EQ(step.conclusion, e);
    EXPECT_TRUE(step_is_valid(step, ax)) << rule_name(step.rule) << " " << e.str();
    for (const auto& p : step.premises) EXPECT_TRUE(res.contains(p));
  }
}

TEST(Saturate, MonotoneInBudget) {
  auto ax = AxiomSet::make(kBin, {commutativity()});
  auto small = saturate(ax, {3, 2, 1'000'000});
  auto large = saturate(ax, {5, 3, 1'000'000});
  for (const auto& e : small.derived) EXPECT_TRUE(large.contains(e)) << e.str();

  // A cut-off run is a prefix of the full run.
  auto cut = saturate(ax, {5, 2, 10});
  EXPECT_FALSE(cut.exhausted);
  auto full = saturate(ax, {5, 2, 1'000'000});
  for (const auto& e : cut.derived) EXPECT_TRUE(full.contains(e));
}

TEST(Saturate, Deterministic) {
  auto ax = AxiomSet::make(kBin, {associativity()});
  auto a = saturate(ax, {5, 3, 1'000'000});
  auto b = saturate(ax, {5, 3, 1'000'000});
  EXPECT_EQ(a.derived, b.derived);
  for (const auto& [e, s] : a.traces) {
    const auto& t = b.traces.at(e);
    EXPECT_EQ(s.rule, t.rule);
    EXPECT_EQ(s.premises, t.premises);
  }
}

TEST(Saturate, RejectsBadBudget) {
  auto ax = AxiomSet::make(kBin, {});
  EXPECT_THROW(saturate(ax, {0, 2, 10}), Error);
  EXPECT_THROW(AxiomSet::make(kBin, {{app(0, {var(0)}), var(0)}}), SignatureMismatch);
}

TEST(Derives, Examples) {
  auto ax = AxiomSet::make(kUnary, {{var(0), var(1)}});
  Equation goal{app(0, {var(0)}), app(0, {app(0, {var(0)})})};
  auto r = derives(ax, goal, {2, 2, 100000});
  ASSERT_TRUE(std::holds_alternative<Derived>(r));
  const auto& trace = std::get<Derived>(r).trace;
  EXPECT_EQ(trace.back().conclusion, goal);
  for (const auto& s : trace) EXPECT_TRUE(step_is_valid(s, ax));

  auto empty = AxiomSet::make(kUnary, {});
  EXPECT_TRUE(std::holds_alternative<Derived>(derives(empty, {var(0), var(0)}, {1, 1, 10})));
  EXPECT_TRUE(std::holds_alternative<Unknown>(derives(empty, {var(0), var(1)}, {4, 3, 100000})));
}

TEST(Algebras, Counts) {
  std::uint64_t n = 0;
  enumerate_algebras(kBin, 2, [&](const FiniteAlgebra&) { return ++n, true; });
  EXPECT_EQ(n, 16U);
  n = 0;
  enumerate_algebras(Signature({1}), 3, [&](const FiniteAlgebra&) { return ++n, true; });
  EXPECT_EQ(n, 27U);
  n = 0;
  enumerate_algebras(kBin, 3, [&](const FiniteAlgebra&) { return ++n, true; });
  EXPECT_EQ(n, 19683U);
  EXPECT_THROW(enumerate_algebras(kBin, 4, [](const FiniteAlgebra&) { return true; }),
               EnumerationTooLarge);
}

TEST(Algebras, LexicographicAndDistinct) {
  auto all = all_algebras(kBin, 2);
  ASSERT_EQ(all.size(), 16U);
  for (std::size_t i = 1; i < all.size(); ++i) EXPECT_LT(all[i - 1].table(0), all[i].table(0));
}

FiniteAlgebra left_projection() {
  FiniteAlgebra a(kBin, 2);
  a.table(0) = {0, 0, 1, 1};
  return a;
}

TEST(HoldsIn, Examples) {
  FiniteAlgebra one(kBin, 1);
  EXPECT_TRUE(holds_in(one, {var(0), var(1)}));
  EXPECT_TRUE(holds_in(one, commutativity()));
  EXPECT_TRUE(holds_in(left_projection(), {mul(var(0), var(1)), var(0)}));
  EXPECT_FALSE(holds_in(left_projection(), commutativity()));
  auto bad = falsifying_assignment(left_projection(), commutativity());
  ASSERT_TRUE(bad);
  EXPECT_EQ(*bad, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_THROW(holds_in(left_projection(), {app(0, {var(0)}), var(0)}), SignatureMismatch);
}

TEST(Refutes, Examples) {
  auto none = AxiomSet::make(kBin, {});
  auto r = refutes(none, {var(0), var(1)}, 2);
  ASSERT_TRUE(std::holds_alternative<CounterModel>(r));
  EXPECT_EQ(std::get<CounterModel>(r).algebra.size(), 2U);
  EXPECT_EQ(std::get<CounterModel>(r).assignment, (std::vector<std::uint32_t>{0, 1}));

  auto assoc = AxiomSet::make(kBin, {associativity()});
  r = refutes(assoc, commutativity(), 2);
  ASSERT_TRUE(std::holds_alternative<CounterModel>(r));
  const auto& cm = std::get<CounterModel>(r);
  EXPECT_EQ(cm.algebra, left_projection());
  EXPECT_TRUE(holds_in(cm.algebra, associativity()));

  auto trivial = AxiomSet::make(kBin, {{var(0), var(1)}});
  EXPECT_TRUE(std::holds_alternative<Unknown>(refutes(trivial, {mul(var(0), var(0)), var(0)}, 3)));
}

TEST(Refutes, RespectsCeiling) {
  auto none = AxiomSet::make(kBin, {});
  EXPECT_THROW(refutes(none, commutativity(), 4), EnumerationTooLarge);
  EXPECT_THROW(refutes(none, commutativity(), 3, 1000), EnumerationTooLarge);
}

TEST(Oracles, SaturationIsSoundOnSmallAlgebras) {
  std::mt19937_64 rng(2024);
  const auto pool = testing::terms_up_to(kBin, 3, 3);
  const auto algebras2 = all_algebras(kBin, 2);
  for (int round = 0; round < 5; ++round) {
    std::vector<Equation> axioms;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int i = 0; i < 2; ++i) axioms.push_back({pool[pick(rng)], pool[pick(rng)]});
    auto ax = AxiomSet::make(kBin, axioms);
    auto res = saturate(ax, {3, 3, 1'000'000});
    for (const auto& alg : algebras2) {
      bool model = true;
      for (const auto& a : ax.axioms) model = model && holds_in(alg, a);
      if (!model) continue;
      for (const auto& e : res.derived) EXPECT_TRUE(holds_in(alg, e)) << e.str();
    }
  }
}

}  // namespace
}  // namespace lwb::eqlogic
