#include <gtest/gtest.h>

#include <random>

#include "lwb/codec.hpp"
#include "lwb/hilbert/proof.hpp"
#include "lwb/hilbert/search.hpp"
#include "lwb/hilbert/text.hpp"
#include "lwb/kripke/frames.hpp"
#include "test_support.hpp"

namespace lwb::hilbert {
namespace {

using codec::parse_formula;
using J = Justification;

const ProofBase kK = ProofBase::axiomatic({Mode::Unimodal, {}});
const ProofBase kKt = ProofBase::axiomatic({Mode::Tense, {}});

ProofObject nec_proof() {
  return {{parse_formula("p0 -> p0"), J::tautology()},
          {parse_formula("box0 (p0 -> p0)"), J::nec(1, 0)}};
}

/// Truth-table oracle: skeleton atoms get every assignment.
bool brute_tautology(const Formula& f) {
  std::set<Formula> atoms;
  std::function<void(const Formula&)> collect = [&](const Formula& g) {
    if (g.is_var() || g.is_box()) atoms.insert(g);
    else
      for (const auto& k : g.kids()) collect(k);
  };
  collect(f);
  std::vector<Formula> list(atoms.begin(), atoms.end());
  for (std::uint64_t row = 0; row < (std::uint64_t{1} << list.size()); ++row) {
    std::function<bool(const Formula&)> val = [&](const Formula& g) -> bool {
      if (g.is_var() || g.is_box()) {
        auto i = std::find(list.begin(), list.end(), g) - list.begin();
        return (row >> i) & 1U;
      }
      if (g.is_bottom()) return false;
      if (g.is_and()) return val(g.lhs()) && val(g.rhs());
      return !val(g.lhs()) || val(g.rhs());
    };
    if (!val(f)) return false;
  }
  return true;
}

/// Every line valid on every frame of at most `n` points: proofs from K
/// (plus valid extras) must pass this whatever the checker says.
bool semantically_sound(const ProofObject& p, std::size_t n, Mode mode) {
  for (const auto& F : kripke::enumerate_frames(n, mode))
    for (const auto& step : p)
      if (!kripke::validates(F, step.formula)) return false;
  return true;
}

TEST(Tautology, Examples) {
  EXPECT_TRUE(tautology_check(parse_formula("p0 -> p0")));
  EXPECT_FALSE(tautology_check(parse_formula("box0 p0 -> p0")));
  EXPECT_TRUE(tautology_check(parse_formula("(box0 p0 & p1) -> box0 p0")));
  EXPECT_TRUE(tautology_check(parse_formula("bot -> p0")));
  EXPECT_FALSE(tautology_check(parse_formula("bot")));
  EXPECT_TRUE(tautology_check(parse_formula("top")));
  EXPECT_FALSE(tautology_check(parse_formula("box0 (p0 -> p0)")));
}

TEST(Tautology, AgreesWithTruthTables) {
  std::mt19937_64 rng(5);
  int checked = 0, tautologies = 0;
  while (checked < 2000) {
    Formula f = testing::random_formula(rng, 4, 3, true);
    std::set<Formula> sub;
    f.collect_subformulas(sub);
    if (std::count_if(sub.begin(), sub.end(), [](const Formula& g) { return g.is_var() || g.is_box(); }) > 4)
      continue;
    ++checked;
    const bool t = brute_tautology(f);
    tautologies += t;
    ASSERT_EQ(tautology_check(f), t) << f.str();
  }
  EXPECT_GT(tautologies, 30);
}

TEST(Tautology, ManyAtoms) {
  // Eight atoms exercise the multi-block path.
  std::string lhs = "p0", rhs = "p0";
  for (int i = 1; i < 8; ++i) {
    lhs = "(" + lhs + " & p" + std::to_string(i) + ")";
    rhs = "(p" + std::to_string(i) + " & " + rhs + ")";
  }
  EXPECT_TRUE(tautology_check(parse_formula(lhs + " -> " + rhs)));
  EXPECT_FALSE(tautology_check(parse_formula(rhs + " -> p8")));
  EXPECT_FALSE(tautology_check(parse_formula("(p0 & p1 & p2 & p3 & p4 & p5 & p6) -> p7")));
}

TEST(CheckProof, Examples) {
  const Formula goal = parse_formula("box0 (p0 -> p0)");
  EXPECT_TRUE(check_proof(kK, std::nullopt, nec_proof(), goal));
  EXPECT_FALSE(check_proof(kK, std::nullopt, nec_proof(), parse_formula("p0 -> p0")));
  EXPECT_FALSE(check_proof(kK, std::nullopt, {{parse_formula("p0"), J::tautology()}}, parse_formula("p0")));
  EXPECT_THROW(check_proof(kK, std::nullopt, {{parse_formula("p0 -> p1"), J::mp(0, 0)}},
                           parse_formula("p0 -> p1")),
               MalformedProof);
  EXPECT_FALSE(check_proof(kK, std::nullopt, {}, goal));
}

TEST(CheckProof, StructuralErrors) {
  const Formula f = parse_formula("p0 -> p0");
  EXPECT_THROW(check_proof(kK, std::nullopt, {{f, J::tautology()}, {f, J::mp(1, 2)}}, f), MalformedProof);
  EXPECT_THROW(check_proof(kK, std::nullopt, {{f, J::tautology()}, {parse_formula("box1 (p0 -> p0)"), J::nec(1, 1)}}, f),
               MalformedProof);
  EXPECT_THROW(check_proof(kK, std::nullopt, {{f, J::k(1)}}, f), MalformedProof);
  EXPECT_THROW(check_proof(kK, std::nullopt, {{f, J::dual(0)}}, f), MalformedProof);
  EXPECT_THROW(check_proof(kK, std::nullopt, {{f, J::extra()}}, f), MalformedProof);
  EXPECT_THROW(check_proof(kK, std::nullopt, {{f, J::axiom_instance(0)}}, f), MalformedProof);
  auto oracle = ProofBase::oracle([](const Code&) { return true; }, Mode::Unimodal);
  EXPECT_THROW(check_proof(oracle, std::nullopt, {{f, J::axiom_instance(0)}}, f), MalformedProof);
}

TEST(CheckProof, Justifications) {
  LogicPresentation T{Mode::Unimodal, {parse_formula("box0 p0 -> p0")}};
  auto base = ProofBase::axiomatic(T);
  const Formula inst = parse_formula("box0 bot -> bot");
  EXPECT_TRUE(check_proof(base, std::nullopt, {{inst, J::axiom_instance(0, {{0, Formula::bottom()}})}}, inst));
  EXPECT_FALSE(check_proof(base, std::nullopt, {{inst, J::axiom_instance(0)}}, inst));
  EXPECT_TRUE(check_proof(base, std::nullopt, {{T.axioms[0], J::in_base()}}, T.axioms[0]));
  EXPECT_FALSE(check_proof(base, std::nullopt, {{inst, J::in_base()}}, inst));

  const Formula k = parse_formula("box0 (p1 -> bot) -> box0 p1 -> box0 bot");
  EXPECT_TRUE(check_proof(kK, std::nullopt, {{k, J::k(0)}}, k));
  EXPECT_FALSE(check_proof(kK, std::nullopt, {{parse_formula("box0 (p1 -> bot) -> box0 p0 -> box0 bot"), J::k(0)}},
                           parse_formula("box0 (p1 -> bot) -> box0 p0 -> box0 bot")));

  const Formula d = parse_formula("p3 -> box1 ~box0 ~p3");
  EXPECT_TRUE(check_proof(kKt, std::nullopt, {{d, J::dual(1)}}, d));
  EXPECT_FALSE(check_proof(kKt, std::nullopt, {{d, J::dual(0)}}, d));

  const Formula extra = parse_formula("p0");
  EXPECT_TRUE(check_proof(kK, extra, {{Formula::bottom(), J::extra({{0, Formula::bottom()}})}}, Formula::bottom()));

  // Modus ponens needs major = minor -> conclusion.
  ProofObject mp = {{parse_formula("p0 -> p0"), J::tautology()},
                    {parse_formula("(p0 -> p0) -> top"), J::tautology()},
                    {parse_formula("top"), J::mp(2, 1)}};
  EXPECT_TRUE(check_proof(kK, std::nullopt, mp, parse_formula("top")));
  mp[2].why = J::mp(1, 2);
  EXPECT_FALSE(check_proof(kK, std::nullopt, mp, parse_formula("top")));
}

TEST(ProofCodes, RoundTrip) {
  ProofObject p = {{parse_formula("p0 -> p0"), J::tautology()},
                   {parse_formula("box1 (p0 -> p0)"), J::nec(1, 1)},
                   {parse_formula("p1"), J::in_base()},
                   {parse_formula("bot"), J::axiom_instance(2, {{0, Formula::bottom()}, {4, parse_formula("box0 p1")}})},
                   {parse_formula("p0"), J::extra({{1, parse_formula("p2 & p3")}})},
                   {parse_formula("p0"), J::k(1)},
                   {parse_formula("p0"), J::dual(0)},
                   {parse_formula("p0"), J::mp(3, 1)}};
  EXPECT_EQ(decode_proof(encode_proof(p)), p);
  for (const auto& step : p) EXPECT_EQ(decode_justification(encode_justification(step.why), Mode::Tense), step.why);
  EXPECT_EQ(encode_justification(J::in_base()), 0);
  EXPECT_EQ(encode_proof({}), 0);
  EXPECT_THROW(decode_justification(pair(8, 0), Mode::Tense), MalformedCode);
  EXPECT_THROW(decode_justification(pair(0, 1), Mode::Tense), MalformedCode);
  EXPECT_THROW(decode_justification(pair(3, 2), Mode::Tense), MalformedCode);
  // Substitutions must list variables in increasing order.
  Code bad = encode_seq({pair(1, 0), pair(0, 0)});
  EXPECT_THROW(decode_justification(pair(5, bad), Mode::Tense), MalformedCode);

  const Code goal = codec::encode_formula(parse_formula("box0 (p0 -> p0)"));
  EXPECT_TRUE(is_proof_code(kK, codec::encode_formula(Formula::top()), encode_proof(nec_proof()), goal));
  EXPECT_FALSE(is_proof_code(kK, 0, encode_proof(nec_proof()), goal + 1));
  EXPECT_FALSE(is_proof_code(kK, 0, 12345, goal));
}

TEST(ProofText, RoundTrip) {
  ProofObject p = {{parse_formula("p0 -> p0"), J::tautology()},
                   {parse_formula("box0 (p0 -> p0)"), J::nec(1, 0)},
                   {parse_formula("bot"), J::extra({{0, Formula::bottom()}})},
                   {parse_formula("p1"), J::axiom_instance(0, {{0, parse_formula("p1 & box0 p2")}, {2, Formula::top()}})},
                   {parse_formula("p1"), J::axiom_instance(1)},
                   {parse_formula("p1"), J::mp(2, 1)}};
  EXPECT_EQ(parse_proof(proof_str(p)), p);
  EXPECT_EQ(proof_str(nec_proof()), "1: p0 -> p0 [Tautology]\n2: box0 (p0 -> p0) [Nec 1 0]\n");
  EXPECT_THROW(parse_proof("2: p0 [Tautology]"), ParseError);
  EXPECT_THROW(parse_proof("1: p0 [Frobnicate]"), ParseError);
  EXPECT_THROW(parse_proof("1: p0 [MP 1]"), ParseError);
  EXPECT_THROW(parse_proof("1: p0 Tautology"), ParseError);
  EXPECT_EQ(parse_proof("# comment\n\n1: p0 [InBase]\n").size(), 1U);

  std::istringstream tabs("# stand-ins\n1 box0 p0 -> p0\n2 box1 p0 -> p0\n");
  auto t = parse_tabs(tabs);
  ASSERT_EQ(t.size(), 2U);
  EXPECT_EQ(t.at(2), parse_formula("box1 p0 -> p0"));
}

TEST(SearchProof, Examples) {
  const Formula goal = parse_formula("box0 (p0 -> p0)");
  auto r = search_proof(kK, Formula::top(), goal, {4, 8});
  ASSERT_TRUE(std::holds_alternative<Found>(r));
  EXPECT_EQ(std::get<Found>(r).proof, nec_proof());

  auto bot = search_proof(kK, parse_formula("p0"), Formula::bottom(), {2, 4});
  ASSERT_TRUE(std::holds_alternative<Found>(bot));
  const auto& proof = std::get<Found>(bot).proof;
  EXPECT_LE(proof.size(), 2U);
  EXPECT_TRUE(check_proof(kK, parse_formula("p0"), proof, Formula::bottom()));

  for (std::size_t len : {1, 3, 6})
    EXPECT_TRUE(std::holds_alternative<Unknown>(search_proof(kK, std::nullopt, Formula::bottom(), {len, 10})));
  EXPECT_TRUE(std::holds_alternative<Unknown>(search_proof(kK, std::nullopt, goal, {1, 8})));
}

TEST(SearchProof, FindsModusPonensChains) {
  // From box0 (p0 & p1): K-distribution gives box0 p0 after a few steps.
  auto r = search_proof(kK, parse_formula("box0 (p0 & p1)"), parse_formula("box0 p0"), {8, 14});
  ASSERT_TRUE(std::holds_alternative<Found>(r));
  EXPECT_TRUE(check_proof(kK, parse_formula("box0 (p0 & p1)"), std::get<Found>(r).proof, parse_formula("box0 p0")));
  // p0 & p0 is inconsistent by substitution, then a tautology and MP.
  r = search_proof(kKt, parse_formula("p0 & p0"), Formula::bottom(), {3, 8});
  ASSERT_TRUE(std::holds_alternative<Found>(r));
  EXPECT_EQ(std::get<Found>(r).proof.size(), 3U);
}

TEST(SearchProof, FoundProofsCheckAndAreSound) {
  std::mt19937_64 rng(9);
  int found = 0;
  for (int i = 0; i < 150; ++i) {
    Formula goal = testing::random_formula(rng, 2, 2, true);
    Formula extra = testing::random_formula(rng, 2, 2, true);
    const bool with_extra = i % 2 == 0;
    std::optional<Formula> e = with_extra ? std::optional<Formula>(extra) : std::nullopt;
    auto r = search_proof(kKt, e, goal, {4, 9});
    if (!std::holds_alternative<Found>(r)) continue;
    ++found;
    const auto& p = std::get<Found>(r).proof;
    EXPECT_TRUE(check_proof(kKt, e, p, goal)) << goal.str();
    if (!with_extra) {
      EXPECT_TRUE(semantically_sound(p, 2, Mode::Tense)) << proof_str(p);
    }
  }
  EXPECT_GT(found, 20);
}

TEST(CheckProof, MutationsAreRejectedOrSound) {
  const Formula goal = parse_formula("box0 (p0 -> p0)");
  const auto original = nec_proof();
  std::mt19937_64 rng(42);
  int rejected = 0, accepted = 0;
  for (int i = 0; i < 100; ++i) {
    ProofObject p = original;
    auto& step = p[rng() % p.size()];
    switch (i % 3) {
      case 0: {
        const J choices[] = {J::in_base(), J::tautology(), J::k(0), J::k(1), J::dual(0),
                             J::extra(), J::mp(1, 1), J::nec(1, 0), J::axiom_instance(0)};
        step.why = choices[rng() % std::size(choices)];
        break;
      }
      case 1:
        step.why.line = rng() % 4;
        step.why.major = rng() % 4;
        step.why.minor = rng() % 4;
        step.why.slot = rng() % 2;
        break;
      default: {
        std::size_t which = rng() % step.formula.size();
        step.formula = testing::mutate_formula(step.formula, which, rng);
      }
    }
    bool ok = false;
    try {
      ok = check_proof(kK, std::nullopt, p, goal);
    } catch (const MalformedProof&) {
      ok = false;
    }
    if (!ok) {
      ++rejected;
      continue;
    }
    ++accepted;
    EXPECT_TRUE(semantically_sound(p, 3, Mode::Unimodal)) << proof_str(p);
    EXPECT_EQ(p.back().formula, goal);
  }
  EXPECT_GT(rejected, 50);
}

TEST(CheckProof, OracleAgreesWithAxioms) {
  LogicPresentation L{Mode::Unimodal, {parse_formula("box0 p0 -> box0 box0 p0")}};
  auto axiomatic = ProofBase::axiomatic(L);
  std::set<Code> instances;
  std::vector<std::pair<ProofObject, Formula>> proofs;
  for (const char* g : {"box0 bot -> box0 box0 bot", "box0 box0 p1 -> box0 box0 box0 p1",
                        "box0 (p0 -> p0)", "box0 p0 -> box0 box0 p0"}) {
    auto r = search_proof(axiomatic, std::nullopt, parse_formula(g), {6, 14});
    ASSERT_TRUE(std::holds_alternative<Found>(r)) << g;
    auto p = std::get<Found>(r).proof;
    for (const auto& s : p)
      if (s.why.kind == J::Kind::Axiom) instances.insert(codec::encode_formula(s.formula));
    proofs.emplace_back(p, parse_formula(g));
  }
  auto oracle = ProofBase::oracle([&](const Code& c) { return instances.count(c) > 0; }, Mode::Unimodal);
  for (auto [p, goal] : proofs) {
    EXPECT_TRUE(check_proof(axiomatic, std::nullopt, p, goal));
    for (auto& s : p)
      if (s.why.kind == J::Kind::Axiom) s.why = J::in_base();
    EXPECT_TRUE(check_proof(oracle, std::nullopt, p, goal));
  }
  const Formula outside = parse_formula("box0 p1 -> box0 box0 p1");
  EXPECT_FALSE(check_proof(oracle, std::nullopt, {{outside, J::in_base()}}, outside));
  EXPECT_TRUE(check_proof(axiomatic, std::nullopt, {{outside, J::axiom_instance(0, {{0, parse_formula("p1")}})}}, outside));
}

TEST(Pretab, InconsistentLogicDischargesEverything) {
  LogicPresentation L{Mode::Tense, {Formula::bottom()}};
  auto v = pretabular_bounded(L, {{1, parse_formula("box0 p0 -> p0")}}, 30, {{3, 8}});
  ASSERT_TRUE(std::holds_alternative<Consistent>(v));
  const auto& report = std::get<Consistent>(v).report;
  EXPECT_FALSE(report.entries.empty());
  EXPECT_EQ(report.entries.size() + report.skipped.size(), 31U);
  for (const auto& e : report.entries) EXPECT_TRUE(e.inconsistent) << e.formula.str();
}

TEST(Pretab, MinimalTenseLogicWithStandInTabs) {
  const TabTable tabs = {{1, parse_formula("box0 p0 -> p0")}, {2, parse_formula("box1 p0 -> p0")}};
  LogicPresentation Kt{Mode::Tense, {}};
  auto v = pretabular_bounded(Kt, tabs, 40, {{3, 8}, 2});
  ASSERT_TRUE(std::holds_alternative<Falsified>(v));
  const auto& f = std::get<Falsified>(v);
  EXPECT_EQ(f.witness, 10);
  const Formula phi = codec::decode_formula(f.witness);
  EXPECT_EQ(phi, parse_formula("box0 p0"));

  // Code 6 is p0 -> p0, a theorem.
  auto six = std::find_if(f.report.entries.begin(), f.report.entries.end(),
                          [](const PretabEntry& e) { return e.code == 6; });
  ASSERT_NE(six, f.report.entries.end());
  EXPECT_TRUE(six->in_logic);

  // No disjunct can hold for box0 p0: the isolated irreflexive point
  // validates Kt + box0 p0 yet refutes both tabs, and a reflexive point
  // refutes box0 p0 itself.
  codec::FiniteFrame dead(1, Mode::Tense), loop(1, Mode::Tense);
  loop.add_edge(0, 0);
  EXPECT_TRUE(kripke::validates(dead, phi));
  for (const auto& [n, tab] : tabs) EXPECT_FALSE(kripke::validates(dead, tab));
  EXPECT_FALSE(kripke::validates(loop, phi));

  // Every earlier formula code is discharged or skipped.
  for (const auto& e : f.report.entries)
    if (e.code < f.witness) {
      EXPECT_TRUE(e.discharged()) << e.code;
    }
  EXPECT_EQ(f.report.skipped.front(), 4);
}

TEST(Pretab, ThreadsDoNotChangeTheReport) {
  const TabTable tabs = {{1, parse_formula("box0 p0 -> p0")}};
  LogicPresentation Kt{Mode::Tense, {}};
  auto a = pretabular_bounded(Kt, tabs, 25, {{3, 8}, 1});
  auto b = pretabular_bounded(Kt, tabs, 25, {{3, 8}, 3});
  const auto& ra = std::get<Falsified>(a).report;
  const auto& rb = std::get<Falsified>(b).report;
  ASSERT_EQ(ra.entries.size(), rb.entries.size());
  for (std::size_t i = 0; i < ra.entries.size(); ++i) {
    EXPECT_EQ(ra.entries[i].in_logic, rb.entries[i].in_logic);
    EXPECT_EQ(ra.entries[i].tab, rb.entries[i].tab);
    EXPECT_EQ(ra.entries[i].inconsistent, rb.entries[i].inconsistent);
  }
}

}  // namespace
}  // namespace lwb::hilbert
