#include <gtest/gtest.h>

#include <random>

#include "lwb/codec.hpp"
#include "lwb/kripke/frames.hpp"
#include "lwb/kripke/validity.hpp"
#include "test_support.hpp"

namespace lwb::kripke {
namespace {

using codec::parse_formula;

const Formula kT = parse_formula("box0 p0 -> p0");

FiniteFrame point(bool loop, Mode mode = Mode::Unimodal) {
  FiniteFrame f(1, mode);
  if (loop) f.add_edge(0, 0);
  return f;
}

std::vector<FiniteFrame> every_frame_up_to(std::size_t n, Mode mode = Mode::Unimodal) {
  std::vector<FiniteFrame> out;
  for (std::size_t k = 1; k <= n; ++k)
    for (auto f : testing::all_frames(k)) {
      f.set_mode(mode);
      out.push_back(f);
    }
  return out;
}

TEST(Validates, Examples) {
  EXPECT_TRUE(validates(point(true), kT));
  EXPECT_FALSE(validates(point(false), kT));
  EXPECT_TRUE(validates(point(false), parse_formula("box0 bot")));
  EXPECT_FALSE(validates(point(true), parse_formula("box0 bot")));
  for (const auto& f : every_frame_up_to(3)) EXPECT_TRUE(validates(f, k_axiom())) << f.str();
}

TEST(Validates, Countermodel) {
  auto cm = falsifying_valuation(point(false), kT);
  ASSERT_TRUE(cm);
  EXPECT_EQ(cm->vars, (std::vector<std::uint64_t>{0}));
  EXPECT_EQ(cm->masks, (std::vector<std::uint64_t>{0}));
  EXPECT_EQ(cm->point, 0U);

  // Variables are reported in increasing order whatever their first use.
  FiniteFrame two(2);
  two.add_edge(0, 1);
  cm = falsifying_valuation(two, parse_formula("p5 -> p2"));
  ASSERT_TRUE(cm);
  EXPECT_EQ(cm->vars, (std::vector<std::uint64_t>{2, 5}));
  std::map<std::uint64_t, std::set<std::size_t>> val;
  for (std::size_t i = 0; i < cm->vars.size(); ++i)
    for (std::size_t x = 0; x < 2; ++x)
      if ((cm->masks[i] >> x) & 1U) val[cm->vars[i]].insert(x);
  EXPECT_FALSE(testing::naive_sat(two, parse_formula("p5 -> p2"), cm->point, val));
}

TEST(Validates, Errors) {
  EXPECT_THROW(validates(point(true), parse_formula("box1 p0")), ModeMismatch);
  EXPECT_NO_THROW(validates(point(true, Mode::Tense), parse_formula("box1 p0")));
  FiniteFrame big(5);
  EXPECT_THROW(validates(big, parse_formula("p0 & p1 & p2 & p3 & p4")), EnumerationTooLarge);
}

TEST(Validates, AgreesWithNaiveEvaluator) {
  std::mt19937_64 rng(7);
  std::vector<Formula> fs;
  for (int i = 0; i < 100; ++i) fs.push_back(testing::random_formula(rng, 3, 2, true));
  for (const auto& f : every_frame_up_to(3, Mode::Tense))
    for (const auto& phi : fs)
      ASSERT_EQ(validates(f, phi), testing::naive_validates(f, phi)) << f.str() << " " << phi.str();
}

TEST(Validates, TenseDualityEverywhere) {
  for (const auto& f : every_frame_up_to(3, Mode::Tense)) {
    EXPECT_TRUE(validates(f, tense_duality(0))) << f.str();
    EXPECT_TRUE(validates(f, tense_duality(1))) << f.str();
    EXPECT_TRUE(validates(f, k_axiom(1))) << f.str();
  }
}

TEST(Validates, OnlyOccurringVariablesMatter) {
  // Renaming variables apart does not change validity.
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    Formula f = testing::random_formula(rng, 3, 2, false);
    Formula g = f.substitute({{0, Formula::var(7)}, {1, Formula::var(3)}});
    for (const auto& F : every_frame_up_to(2)) EXPECT_EQ(validates(F, f), validates(F, g));
  }
}

TEST(EnumerateFrames, CountsMatchBurnside) {
  std::size_t cumulative = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto masks = canonical_masks(n);
    EXPECT_EQ(masks.size(), testing::burnside_frame_count(n)) << n;
    cumulative += masks.size();
    EXPECT_EQ(enumerate_frames(n).size(), cumulative);
  }
  EXPECT_EQ(enumerate_frames(1).size(), 2U);
  EXPECT_EQ(enumerate_frames(2).size(), 12U);
  EXPECT_EQ(enumerate_frames(3).size(), 116U);
}

TEST(EnumerateFrames, OneRepresentativePerClass) {
  const auto frames = enumerate_frames(3);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EXPECT_EQ(encode_frame(frames[i]), canonical_frame_code(frames[i]));
    for (std::size_t j = i + 1; j < frames.size(); ++j)
      EXPECT_FALSE(testing::isomorphic(frames[i], frames[j]));
    if (i) {
      EXPECT_LT(encode_frame(frames[i - 1]), encode_frame(frames[i]));
    }
  }
  // Every raw frame is isomorphic to one listed.
  for (const auto& f : every_frame_up_to(3)) {
    auto code = canonical_frame_code(f);
    EXPECT_TRUE(std::any_of(frames.begin(), frames.end(),
                            [&](const FiniteFrame& g) { return encode_frame(g) == code; }));
  }
}

TEST(EnumerateFrames, ThreadsDoNotChangeOrder) {
  EXPECT_EQ(canonical_masks(4, 1), canonical_masks(4, 4));
  EXPECT_EQ(enumerate_frames(3, Mode::Unimodal, {5, 1}), enumerate_frames(3, Mode::Unimodal, {5, 3}));
}

TEST(EnumerateFrames, Ceiling) {
  EXPECT_THROW(enumerate_frames(6), EnumerationTooLarge);
  EXPECT_THROW(enumerate_frames(3, Mode::Unimodal, {2, 1}), EnumerationTooLarge);
  EXPECT_THROW(enumerate_frames(9, Mode::Unimodal, {20, 1}), EnumerationTooLarge);
}

TEST(FiniteFramesOf, Examples) {
  LogicPresentation K;
  EXPECT_EQ(finite_frames_of(K, 1).size(), 2U);
  LogicPresentation T{Mode::Unimodal, {kT}};
  auto t1 = finite_frames_of(T, 1);
  ASSERT_EQ(t1.size(), 1U);
  EXPECT_EQ(t1[0], point(true));
  LogicPresentation inconsistent{Mode::Unimodal, {Formula::bottom()}};
  EXPECT_TRUE(finite_frames_of(inconsistent, 3).empty());
  // Reflexive frames up to 3 points: every class with all loops.
  auto t3 = finite_frames_of(T, 3);
  for (const auto& f : t3)
    for (std::size_t x = 0; x < f.size(); ++x) EXPECT_TRUE(f.related(x, x));
  EXPECT_THROW(finite_frames_of({Mode::Unimodal, {parse_formula("box1 p0")}}, 1), ModeMismatch);
}

TEST(FiniteFramesOf, Antitone) {
  const std::vector<Formula> axioms = {kT, parse_formula("box0 p0 -> box0 box0 p0"),
                                       parse_formula("p0 -> box0 ~box0 ~p0")};
  LogicPresentation L;
  std::size_t prev = finite_frames_of(L, 3).size();
  for (const auto& a : axioms) {
    L.axioms.push_back(a);
    auto now = finite_frames_of(L, 3);
    EXPECT_LE(now.size(), prev);
    prev = now.size();
  }
}

TEST(FmpEqual, Examples) {
  LogicPresentation K;
  LogicPresentation T{Mode::Unimodal, {kT}};
  auto v = fmp_equal_bounded(K, T, 1);
  ASSERT_TRUE(std::holds_alternative<Distinguished>(v));
  EXPECT_EQ(std::get<Distinguished>(v).frame, point(false));
  EXPECT_EQ(std::get<Distinguished>(v).side, Side::LeftOnly);

  auto w = fmp_equal_bounded(T, K, 1);
  ASSERT_TRUE(std::holds_alternative<Distinguished>(w));
  EXPECT_EQ(std::get<Distinguished>(w).side, Side::RightOnly);

  LogicPresentation taut{Mode::Unimodal, {parse_formula("p0 -> p0")}};
  auto e = fmp_equal_bounded(taut, K, 3);
  ASSERT_TRUE(std::holds_alternative<EqualUpTo>(e));
  EXPECT_EQ(std::get<EqualUpTo>(e).bound, 3U);

  LogicPresentation tense{Mode::Tense, {}};
  EXPECT_THROW(fmp_equal_bounded(K, tense, 1), ModeMismatch);
}

TEST(FmpEqual, ReflexiveSymmetricTransitive) {
  std::mt19937_64 rng(3);
  std::vector<LogicPresentation> logics;
  for (int i = 0; i < 6; ++i)
    logics.push_back({Mode::Unimodal, {testing::random_formula(rng, 2, 1, false)}});
  auto equal = [](const FmpVerdict& v) { return std::holds_alternative<EqualUpTo>(v); };
  for (const auto& a : logics) {
    EXPECT_TRUE(equal(fmp_equal_bounded(a, a, 3)));
    for (const auto& b : logics) {
      auto ab = fmp_equal_bounded(a, b, 2), ba = fmp_equal_bounded(b, a, 2);
      ASSERT_EQ(equal(ab), equal(ba));
      if (!equal(ab)) {
        EXPECT_EQ(std::get<Distinguished>(ab).frame, std::get<Distinguished>(ba).frame);
        EXPECT_NE(std::get<Distinguished>(ab).side, std::get<Distinguished>(ba).side);
      }
      for (const auto& c : logics)
        if (equal(ab) && equal(fmp_equal_bounded(b, c, 2))) {
          EXPECT_TRUE(equal(fmp_equal_bounded(a, c, 2)));
        }
    }
  }
}

}  // namespace
}  // namespace lwb::kripke
