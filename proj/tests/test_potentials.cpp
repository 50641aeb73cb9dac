#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "inertia/determining.hpp"
#include "inertia/potentials.hpp"

using namespace inertia;

TEST(Catalog, M1Defaults) {
  PotentialSpec s = make_class(PotentialClass::M1, {{"q0", 1}, {"C2", 1}});
  ASSERT_TRUE(s.expected_extension);
  EXPECT_TRUE(span_equal(*s.expected_extension, {{0, 1, 0, 0}, {1, 0, -2, 3}}));
  // -rhodot^2 rho^(-5/3) + phi2
  WDerivatives D(s.W);
  EXPECT_NEAR(evaluate(D.Wdd, s.env, 2.0, 0.3), -2.0 * std::pow(2.0, -5.0 / 3.0), 1e-14);
  EXPECT_EQ(s.class_tag, PotentialClass::M1);
}

TEST(Catalog, M15IsMinusRhodotSquared) {
  PotentialSpec s = make_class(PotentialClass::M15, {{"q0", 1}});
  for (double r : {0.5, 1.5})
    for (double d : {0.2, 2.0}) EXPECT_NEAR(s(r, d), -d * d, 1e-14);
  EXPECT_TRUE(span_equal(*s.expected_extension, {{1, 0, 0, 2}, {1, 0, -1, 0}}));
}

TEST(Catalog, M7GreenNaghdiShape) {
  PotentialSpec s = make_class(PotentialClass::M7, {{"q0", 1.0 / 6}, {"lambda", 1}, {"p", 2}, {"C2", 1}, {"mu", 0}});
  ASSERT_EQ(s.expected_extension->size(), 1u);
  EXPECT_TRUE(span_equal(*s.expected_extension, {{1, 0, 1, 2}}));
}

TEST(Catalog, ExpectedDimensions) {
  const int dims[] = {2, 3, 1, 1, 1, 1, 1, 2, 1, 2, 1, 1, 2, 1, 2};
  for (PotentialClass c : all_classes())
    EXPECT_EQ(static_cast<int>(make_class(c).expected_extension->size()), dims[static_cast<int>(c) - 1])
        << class_name(c);
}

TEST(Catalog, SideConditions) {
  EXPECT_THROW(make_class(PotentialClass::M1, {{"q0", 1}, {"C2", 0}}), InvalidPotential);
  EXPECT_THROW(make_class(PotentialClass::M2, {{"q0", 0}}), InvalidPotential);
  ClassOptions loose;
  loose.check_side_conditions = false;
  EXPECT_NO_THROW(make_class(PotentialClass::M1, {{"q0", 1}, {"C2", 0}}, loose));
}

TEST(Catalog, EveryClassHasNonzeroWdd) {
  for (PotentialClass c : all_classes()) EXPECT_NO_THROW(validate(make_class(c))) << class_name(c);
}

TEST(Validate, RejectsLinearInRhodot) {
  PotentialSpec s;
  s.W = parse("rho^2 + rho*rhodot");
  EXPECT_THROW(validate(s), InvalidPotential);
  s.W = parse("q0*rhodot^2");
  EXPECT_THROW(validate(s), InvalidPotential);  // q0 unbound
}

TEST(Preset, GreenNaghdi) {
  PotentialSpec s = preset("green_naghdi");
  EXPECT_NEAR(s(1.0, 1.0), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(s.class_tag, PotentialClass::M7);
}

TEST(Preset, Chaplygin) {
  PotentialSpec s = preset("chaplygin_m3");
  ASSERT_TRUE(s.expected_extension);
  EXPECT_TRUE(span_equal(*s.expected_extension, {{-2, 0, 2, 0}}));
  EXPECT_THROW(preset("nope"), UnknownPreset);
}

TEST(Equivalence, X12AddsConstant) {
  PotentialSpec s;
  s.W = parse("rho*rhodot");
  PotentialSpec t = apply_equivalence(s, {EquivalenceId::X12, 5.0});
  EXPECT_DOUBLE_EQ(t(2.0, 3.0), 11.0);
}

TEST(Equivalence, ZeroParameterIsIdentity) {
  PotentialSpec s = make_class(PotentialClass::M9);
  for (EquivalenceId id : all_equivalences()) {
    PotentialSpec t = apply_equivalence(s, {id, 0.0});
    for (double r : {0.7, 1.4}) EXPECT_NEAR(t(r, 0.9), s(r, 0.9), 1e-13) << equivalence_name(id);
  }
}

// The graph of W is transformed: a point (rhodot, W) goes to (e^{-a} rhodot, W),
// so W'(rho, rhodot') = W(rho, e^{a} rhodot').
TEST(Equivalence, X11ActsOnTheGraph) {
  PotentialSpec s;
  s.W = parse("-rhodot^2");
  EXPECT_DOUBLE_EQ(apply_equivalence(s, {EquivalenceId::X11, std::log(2.0)})(1.0, 2.0), -16.0);
  EXPECT_NEAR(apply_equivalence(s, {EquivalenceId::X11, -std::log(2.0)})(1.0, 2.0), -1.0, 1e-14);
}

TEST(Equivalence, PreservesDimension) {
  for (PotentialClass c : {PotentialClass::M2, PotentialClass::M7, PotentialClass::M13}) {
    PotentialSpec s = make_class(c);
    int d = classify(s).dim;
    for (EquivalenceId id : all_equivalences())
      EXPECT_EQ(classify(apply_equivalence(s, {id, 0.3})).dim, d) << class_name(c) << " " << equivalence_name(id);
  }
}

TEST(PotentialFile, ClassAndParameters) {
  std::istringstream in("# comment\nclass=M7\nq0 = 0.1667\nlambda=1\np=2\nC2=1\nmu=0\n");
  PotentialSpec s = potential_from_map(read_key_values(in));
  EXPECT_EQ(s.class_tag, PotentialClass::M7);
  EXPECT_DOUBLE_EQ(s.env.at("q0"), 0.1667);
}

TEST(PotentialFile, FreeForm) {
  std::istringstream in("W=-q0*rhodot^2*rho^(-5/3) + beta*rho^(5/3)\nq0=1\nbeta=1/2\n");
  PotentialSpec s = potential_from_map(read_key_values(in));
  EXPECT_NEAR(s(1.0, 1.0), -0.5, 1e-15);
}

TEST(PotentialFile, Errors) {
  auto load = [](const std::string& text) {
    std::istringstream in(text);
    return potential_from_map(read_key_values(in));
  };
  EXPECT_THROW(load("class=M99\n"), InvalidPotential);
  EXPECT_THROW(load("q0=1\n"), InvalidPotential);
  EXPECT_THROW(load("class=M2\nW=rho\nq0=1\n"), InvalidPotential);
  EXPECT_THROW(load("class=M2\nq0=1\nq0=2\n"), InvalidPotential);
  EXPECT_THROW(load("class=M2\nq0=rho\n"), InvalidPotential);
  EXPECT_THROW(load("W=rho*rhodot^2\nnot a pair\n"), InvalidPotential);
  EXPECT_THROW(read_potential_file("/nonexistent/file.txt"), InvalidPotential);
}

TEST(PotentialFile, DataDirectorySamples) {
  for (const char* f : {"m7.txt", "green_naghdi.txt", "chaplygin.txt", "vortex_beta0.txt", "vortex_beta.txt",
                        "generic.txt", "m14.txt"})
    EXPECT_NO_THROW(read_potential_file(std::string(INERTIA_DATA_DIR) + "/potentials/" + f)) << f;
}
