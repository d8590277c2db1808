#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "corpus.hpp"
#include "dincl/error.hpp"
#include "dincl/setvalued.hpp"

using namespace dincl;
using namespace dincl::testing;

TEST(PiecewiseFn, BreakpointConvention) {
  PiecewiseFn f({1.0}, {parse_expr("s"), parse_expr("2*s")});
  EXPECT_EQ(f(0.5), 0.5);
  EXPECT_EQ(f(1.0), 2.0);  // right branch at the break
  EXPECT_EQ(f.limit(1.0, Side::Left), 1.0);
  EXPECT_EQ(f.limit(1.0, Side::Right), 2.0);

  PiecewiseFn g({1.0}, {parse_expr("s"), parse_expr("2*s")}, {{1.0, 7.0}});
  EXPECT_EQ(g(1.0), 7.0);
  EXPECT_EQ(g.limit(1.0, Side::Left), 1.0);
}

TEST(PiecewiseFn, RejectsBadShapes) {
  EXPECT_THROW(PiecewiseFn({1.0}, {parse_expr("s")}), InvalidMap);
  EXPECT_THROW(PiecewiseFn({2.0, 1.0}, {parse_expr("s"), parse_expr("s"), parse_expr("s")}), InvalidMap);
}

TEST(IntervalMap, EvalExamples) {
  const auto F = case_study_map();
  const Interval at2 = eval_F(*F, 2.0);
  EXPECT_DOUBLE_EQ(at2.lo, 1.6931471805599454);
  EXPECT_EQ(at2.hi, 4.0);
  EXPECT_EQ(eval_F(*F, 0.0), (Interval{0.0, 0.0}));
  EXPECT_EQ(eval_F(*F, 1.0), (Interval{0.0, 1.0}));
  EXPECT_EQ(eval_F(*sign_jump_map(), 0.0), (Interval{-2.0, 2.0}));
  EXPECT_EQ(eval_F(*sign_jump_map(), -0.1), (Interval{-1.0, -1.0}));
}

TEST(IntervalMap, OddReflectionIsExact) {
  const auto F = case_study_map();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-20.0, 20.0);
  for (int i = 0; i < 2000; ++i) {
    const double s = d(rng);
    EXPECT_EQ(eval_F(*F, -s), eval_F(*F, s).reflected()) << s;
  }
  EXPECT_EQ(eval_F(*F, -1.0), (Interval{-1.0, 0.0}));
}

TEST(IntervalMap, LowerNeverExceedsUpper) {
  for (const auto& F : {case_study_map(), sign_jump_map(), constant_map(0, 1)}) {
    for (int i = -4000; i <= 4000; ++i) {
      const Interval v = eval_F(*F, i * 0.0025);
      ASSERT_LE(v.lo, v.hi);
    }
  }
}

TEST(IntervalMap, RejectsCrossedEnvelopes) {
  PiecewiseFn lo({}, {parse_expr("s")});
  PiecewiseFn hi({}, {parse_expr("0")});
  EXPECT_THROW(IntervalMap(lo, hi), InvalidMap);
}

TEST(IntervalMap, RejectsBranchDomainError) {
  PiecewiseFn lo({}, {parse_expr("ln(s)")});
  PiecewiseFn hi({}, {parse_expr("ln(s)+1")});
  try {
    IntervalMap F(lo, hi);
    FAIL();
  } catch (const InvalidMap& e) {
    EXPECT_NE(std::string(e.what()).find("ln(s)"), std::string::npos);
  }
}

TEST(CheckUsc, Corpus) {
  EXPECT_TRUE(check_usc(*sign_jump_map()).ok);
  EXPECT_TRUE(check_usc(*case_study_map()).ok);
  EXPECT_TRUE(check_usc(*constant_map(0, 1)).ok);
}

TEST(CheckUsc, ShrunkValueAtJumpIsLocalized) {
  const UscReport rep = check_usc(*sign_jump_map(-0.5, 0.5));
  ASSERT_FALSE(rep.ok);
  for (const UscViolation& v : rep.violations) EXPECT_EQ(v.s, 0.0);
  bool saw_max = false;
  for (const UscViolation& v : rep.violations) saw_max |= v.kind == "max_not_usc";
  EXPECT_TRUE(saw_max);
}

TEST(CheckUsc, StableUnderRefinement) {
  for (const auto& F : {sign_jump_map(), case_study_map()}) {
    EXPECT_TRUE(check_usc(*F, 1e-6, 10, 40).ok);
    EXPECT_TRUE(check_usc(*F, 1e-6, 10, 50).ok);
    EXPECT_TRUE(check_usc(*F, 1e-6, 5, 50).ok);
  }
}

TEST(CheckUsc, OscillatingBranchIsNonconvergent) {
  PiecewiseFn lo({0.0}, {parse_expr("-2"), parse_expr("sin(1/s)-1")}, {{0.0, -2.0}});
  PiecewiseFn hi({0.0}, {parse_expr("2"), parse_expr("sin(1/s)+1")}, {{0.0, 2.0}});
  const UscReport rep = check_usc(IntervalMap(lo, hi));
  ASSERT_FALSE(rep.ok);
  bool saw = false;
  for (const UscViolation& v : rep.violations) saw |= v.kind == "nonconvergent_limit" && v.s == 0.0;
  EXPECT_TRUE(saw);
}

TEST(CheckGrowth, Examples) {
  EXPECT_DOUBLE_EQ(check_growth(*constant_map(0, 1), 2.0, {-10, 10}, 2001).bound.a, 1.0);
  const GrowthFit cs = check_growth(*case_study_map(), 3.0, {-10, 10}, 2001);
  EXPECT_GE(cs.bound.a, 0.5);
  EXPECT_LE(cs.bound.a, 1.0);
  EXPECT_TRUE(cs.within_cap);
  const GrowthFit sj = check_growth(*sign_jump_map(), 2.0, {-10, 10}, 2000);
  EXPECT_DOUBLE_EQ(sj.bound.a, 2.0);
  EXPECT_EQ(sj.argmax, 0.0);
}

TEST(CheckGrowth, CapFlag) {
  EXPECT_FALSE(check_growth(*constant_map(0, 10), 2.0, {-1, 1}, 11, 5.0).within_cap);
}

TEST(Aumann, Examples) {
  const Interval c = aumann(*constant_map(0, 1), 2.0);
  EXPECT_NEAR(c.lo, 0.0, 1e-12);
  EXPECT_NEAR(c.hi, 2.0, 1e-12);

  const Interval sj = aumann(*sign_jump_map(), 1.0);
  EXPECT_NEAR(sj.lo, 1.0, 1e-12);
  EXPECT_NEAR(sj.hi, 1.0, 1e-12);

  // J is even for an odd map: both oriented integrals over [0, -1] equal
  // the ones over [0, 1].
  const Interval cs = aumann(*case_study_map(), -1.0);
  EXPECT_NEAR(cs.lo, 0.0, 1e-10);
  EXPECT_NEAR(cs.hi, log_antiderivative(1.0), 1e-10);
  EXPECT_NEAR(cs.hi, 0.26394350735484, 1e-13);
}

TEST(Aumann, ZeroAtOrigin) {
  for (const auto& F : {case_study_map(), sign_jump_map(), constant_map(-3, 1)}) {
    EXPECT_EQ(aumann(*F, 0.0), (Interval{0.0, 0.0}));
  }
}

TEST(Aumann, ClosedFormOnSmoothPiece) {
  const auto F = case_study_map();
  for (double s = -1.0; s <= 1.0; s += 0.0625) {
    const Interval v = aumann(*F, s);
    const double oracle = log_antiderivative(std::abs(s));
    EXPECT_NEAR(v.hi, oracle, 1e-10) << s;
    EXPECT_NEAR(v.lo, 0.0, 1e-10) << s;
  }
  // Past the jump: lo = ln s + 1 integrates to s ln s, hi = s^2 to (s^3 - 1)/3.
  const Interval at2 = aumann(*F, 2.0);
  EXPECT_NEAR(at2.lo, 2.0 * std::log(2.0), 1e-10);
  EXPECT_NEAR(at2.hi, log_antiderivative(1.0) + 7.0 / 3.0, 1e-10);
}

TEST(Aumann, MonotoneInWidth) {
  // [0, 1] sits inside [-1, 2] pointwise.
  const auto narrow = constant_map(0, 1);
  const auto wide = constant_map(-1, 2);
  for (double s : {-2.5, -1.0, 0.3, 1.0, 3.0}) {
    EXPECT_TRUE(aumann(*wide, s).contains(aumann(*narrow, s), 1e-10)) << s;
  }
  // The case-study map inside a symmetric quadratic band.
  PiecewiseFn lo({}, {parse_expr("-(s^2+1)")});
  PiecewiseFn hi({}, {parse_expr("s^2+1")});
  const IntervalMap band(lo, hi);
  const auto F = case_study_map();
  for (double s : {-2.0, -0.5, 0.5, 1.5, 2.0}) {
    EXPECT_TRUE(aumann(band, s).contains(aumann(*F, s), 1e-9)) << s;
  }
}

TEST(Hypotheses, CaseStudyPasses) {
  const HypothesisReport rep = check_hypotheses(*case_study_map(), 1.0);
  EXPECT_TRUE(rep.zero.pass) << rep.zero.detail;
  EXPECT_TRUE(rep.inf.pass) << rep.inf.detail;
  EXPECT_TRUE(rep.ss.pass) << rep.ss.detail;
  EXPECT_TRUE(rep.all());
}

TEST(Hypotheses, ConstantFailsZero) {
  const HypothesisReport rep = check_hypotheses(*constant_map(1, 1), 1.0);
  EXPECT_FALSE(rep.zero.pass);
}

TEST(Hypotheses, QuadraticFailsInf) {
  PiecewiseFn q({}, {parse_expr("s^2")});
  const IntervalMap F(q, q, true);
  const HypothesisReport rep = check_hypotheses(F, 1.0);
  EXPECT_TRUE(rep.zero.pass) << rep.zero.detail;
  EXPECT_FALSE(rep.inf.pass);
}

TEST(Hypotheses, NonPositiveUpperFailsSs) {
  const HypothesisReport rep = check_hypotheses(*constant_map(-1, 0), 1.0);
  EXPECT_FALSE(rep.ss.pass);
}
