#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "inertia/determining.hpp"
#include "inertia/reports.hpp"

using namespace inertia;

TEST(Residual, M2PureX6VanishesOnE8) {
  PotentialSpec s = make_class(PotentialClass::M2, {{"q0", 1}});
  for (double r : {0.5, 1.3, 2.2})
    for (double d : {-1.0, 0.4, 1.7}) EXPECT_NEAR(residual(s, {0, 1, 0, 0}, Equation::E8, r, d), 0.0, 1e-12);
}

TEST(Residual, ZeroGenerator) {
  PotentialSpec s = make_class(PotentialClass::M11);
  for (Equation eq : all_equations()) EXPECT_EQ(residual(s, {0, 0, 0, 0}, eq, 1.2, 0.8), 0.0);
}

TEST(Residual, M15E5ByHand) {
  PotentialSpec s = make_class(PotentialClass::M15, {{"q0", 1}});
  EXPECT_NEAR(residual(s, {1, 0, -1, 0}, Equation::E5, 1.0, 1.0), 0.0, 1e-14);
}

TEST(Residual, ExpectedGeneratorsAnnihilateEveryEquation) {
  for (PotentialClass c : all_classes()) {
    PotentialSpec s = make_class(c);
    EXPECT_LT(expected_generator_residual(s, *s.expected_extension, 50, 3), 1e-8) << class_name(c);
  }
}

TEST(Residual, WrongGeneratorDoesNot) {
  PotentialSpec s = make_class(PotentialClass::M9);
  EXPECT_GT(expected_generator_residual(s, {{1, 0, 0, 0}}, 50, 3), 1e-3);
}

TEST(SpanEqual, Examples) {
  EXPECT_TRUE(span_equal({{1, 0, -2, 3}}, {{2, 0, -4, 6}}));
  EXPECT_FALSE(span_equal({{1, 0, 0, 0}}, {{0, 1, 0, 0}}));
  EXPECT_TRUE(span_equal({{1, 0, 0, 0}, {0, 1, 0, 0}}, {{1, 1, 0, 0}, {1, -1, 0, 0}}));
  EXPECT_FALSE(span_equal({{1, 0, 0, 0}, {0, 1, 0, 0}}, {{1, 0, 0, 0}}));
  EXPECT_TRUE(span_equal({}, {}));
}

TEST(Classify, M1) {
  Classification c = classify(make_class(PotentialClass::M1, {{"q0", 1}, {"C2", 1}}));
  EXPECT_EQ(c.dim, 2);
  EXPECT_TRUE(span_equal(c.basis, {{0, 1, 0, 0}, {1, 0, -2, 3}}));
}

TEST(Classify, M2) {
  Classification c = classify(make_class(PotentialClass::M2, {{"q0", 1}}));
  EXPECT_EQ(c.dim, 3);
  EXPECT_TRUE(span_equal(c.basis, {{0, 1, 0, 0}, {1, 0, 0, -3}, {0, 0, 1, -3}}));
}

TEST(Classify, M8AgainstFormula) {
  Classification c = classify(make_class(PotentialClass::M8, {{"q0", 1}, {"p", 3}, {"lambda", 1}}));
  EXPECT_TRUE(span_equal(c.basis, {{3, 0, -2, 0}, {3, 0, 0, 2}}));
}

TEST(Classify, GreenNaghdi) {
  Classification c = classify(preset("green_naghdi"));
  ASSERT_EQ(c.dim, 1);
  EXPECT_TRUE(span_equal(c.basis, {{1, 0, 1, 2}}));
}

TEST(Classify, ChaplyginM3) {
  Classification c = classify(preset("chaplygin_m3"));
  ASSERT_EQ(c.dim, 1);
  EXPECT_TRUE(span_equal(c.basis, {{-2, 0, 2, 0}}));
}

TEST(Classify, GenericPotentialHasNoExtension) {
  PotentialSpec s;
  s.W = parse("exp(rho + rhodot^2)");
  EXPECT_EQ(classify(s).dim, 0);
}

TEST(Classify, SeedDoesNotChangeDimension) {
  for (PotentialClass c : all_classes()) {
    SamplingPlan a, b;
    a.seed = 1;
    b.seed = 987654321;
    EXPECT_EQ(classify(make_class(c), a).dim, classify(make_class(c), b).dim) << class_name(c);
  }
}

TEST(Classify, DeterministicForFixedSeed) {
  PotentialSpec s = make_class(PotentialClass::M6);
  Classification a = classify(s), b = classify(s);
  ASSERT_EQ(a.singular_values.size(), b.singular_values.size());
  for (std::size_t i = 0; i < a.singular_values.size(); ++i) EXPECT_EQ(a.singular_values[i], b.singular_values[i]);
}

TEST(Table1, AllPass) {
  Table1Report r = verify_table1();
  EXPECT_EQ(r.passed(), 15) << r.text();
  EXPECT_LT(r.seconds, 60.0);
}

TEST(Table1, CorruptedM1Fails) {
  Table1Options opt;
  opt.overrides[PotentialClass::M1] = {{"C2", 0.0}};
  Table1Report r = verify_table1(opt);
  EXPECT_FALSE(r.rows[0].pass());
  EXPECT_EQ(r.rows[0].dim, 3);
  EXPECT_EQ(r.passed(), 14);
}

TEST(Table1, TwoSeedsSamePassVector) {
  Table1Options a, b;
  a.seed = 5;
  b.seed = 77;
  auto ra = verify_table1(a), rb = verify_table1(b);
  for (std::size_t i = 0; i < ra.rows.size(); ++i) EXPECT_EQ(ra.rows[i].pass(), rb.rows[i].pass());
}

TEST(Table1, EquivalenceInvariance) {
  int checks = 0;
  for (PotentialClass c : all_classes()) {
    PotentialSpec s = make_class(c);
    int d = classify(s).dim;
    for (EquivalenceId id : all_equivalences())
      for (double a : {-0.7, 0.3, 1.1}) {
        EXPECT_EQ(classify(apply_equivalence(s, {id, a})).dim, d) << class_name(c) << " " << equivalence_name(id);
        ++checks;
      }
  }
  EXPECT_EQ(checks, 270);
}
