#include <gtest/gtest.h>

#include <cmath>

#include "venation/error.hpp"
#include "venation/experiments.hpp"

using namespace venation;

TEST(Catalog, TestA) {
  const auto& t = lookup_test("TestA");
  EXPECT_EQ(t.system, SystemKind::kVector);
  EXPECT_EQ(t.params_m.metabolic_rate, 0.5);
  EXPECT_EQ(t.params_m.activation, 1.0);
  EXPECT_EQ(t.params_m.diffusivity, 0.01);
  EXPECT_EQ(t.params_m.metabolic_exp, 0.75);
  EXPECT_EQ(t.params_m.background, 0.1);
  EXPECT_EQ(t.t_fin, 1.0);
}

TEST(Catalog, TestM) {
  const auto& t = lookup_test("TestM");
  EXPECT_TRUE(t.matched);
  EXPECT_EQ(t.n, 600);
  EXPECT_EQ(t.params_c.metabolic_rate, 1.0);
  EXPECT_EQ(t.params_m.metabolic_rate, 0.5);
  EXPECT_DOUBLE_EQ(t.params_c.activation, std::sqrt(2.0));
  EXPECT_EQ(t.params_m.activation, 1.0);
  EXPECT_EQ(t.params_c.diffusivity, 0.1);
  EXPECT_EQ(t.params_c.regularization, 0.1);
  EXPECT_EQ(t.params_c.metabolic_exp, 1.75);
  EXPECT_EQ(t.params_m.metabolic_exp, 0.75);
  EXPECT_EQ(t.params_c.background, 0.1);
}

TEST(Catalog, Sweeps) {
  EXPECT_EQ(lookup_test("TestN").params_m.diffusivity, 0.0);
  EXPECT_EQ(lookup_test("TestO").params_m.diffusivity, 1e-5);
  EXPECT_EQ(lookup_test("TestG").params_m.diffusivity, 0.05);
  EXPECT_EQ(lookup_test("TestE").params_m.diffusivity, 0.001);
  EXPECT_EQ(lookup_test("TestF").params_m.metabolic_exp, 0.5);
  EXPECT_EQ(lookup_test("TestH").params_m.metabolic_exp, 1.0);
  EXPECT_EQ(lookup_test("TestI").params_c.regularization, 1e-2);
  EXPECT_EQ(lookup_test("TestL").params_c.regularization, 1e-4);
  EXPECT_EQ(lookup_test("TestD-g175").params_m.metabolic_exp, 1.75);
  EXPECT_EQ(lookup_test("TestB").params_c.regularization, 0.1);
}

TEST(Catalog, UnknownName) {
  try {
    lookup_test("TestZ");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotFound);
  }
}

TEST(InitialData, Recipes) {
  const GridSpec g(10);
  const auto pm = initial_m("prepared_m", g);
  const auto pc = initial_c("prepared_c", g);
  EXPECT_NEAR(pc.c11(3, 3), 0.5, 1e-15);
  EXPECT_NEAR(pc.c12(3, 3), 0.5, 1e-15);
  EXPECT_NEAR(pc.c22(3, 3), 0.5, 1e-15);
  EXPECT_EQ(discrepancy_norm(pc, pm), 0.0);

  EXPECT_DOUBLE_EQ(ridge_profile(0.5, 0.5), 1.0);
  const auto dc = initial_c("default_c", g);
  EXPECT_DOUBLE_EQ(dc.frobenius()(4, 5), std::sqrt(2.0));

  const auto m01 = initial_m("m01", g);
  EXPECT_DOUBLE_EQ(m01.c2(1, 1), std::sqrt(2.0));

  // Recipes are sampled on every cell, the wall condition lives in the scheme.
  const auto z = initial_m("m02", g);
  EXPECT_EQ(z.c1(0, 4), 5.0);
  EXPECT_EQ(z.c1(4, 4), 5.0);

  EXPECT_THROW(initial_m("default_c", g), Error);
  EXPECT_THROW(initial_condition("nope", g), Error);
}

TEST(Matched, Rule) {
  SystemParams m;
  m.metabolic_rate = 0.5;
  m.metabolic_exp = 0.75;
  m.activation = 1.0;
  m.diffusivity = 0.1;
  auto c = matched_params(m, 1.0);
  EXPECT_EQ(c.metabolic_rate, 1.0);
  EXPECT_EQ(c.metabolic_exp, 1.75);
  EXPECT_DOUBLE_EQ(c.activation, std::sqrt(2.0));
  EXPECT_EQ(c.diffusivity, 0.1);
  m.activation = 0.0;
  EXPECT_EQ(matched_params(m, 1.0).activation, 0.0);
  m.metabolic_exp = 0.5;
  EXPECT_EQ(matched_params(m, 1.0).metabolic_exp, 1.5);
}

TEST(Metrics, Diff) {
  const GridSpec g(5);
  const auto a = initial_m("m03", g);
  EXPECT_EQ(diff_metric(a, a), 0.0);
  EXPECT_DOUBLE_EQ(diff_metric(VectorField2(g), a), 1.0);
  EXPECT_THROW(diff_metric(a, VectorField2(g)), Error);
}

TEST(Metrics, DiscrepancyScales) {
  const GridSpec g(6);
  const auto m = initial_m("prepared_m", g);
  SymTensorField2 c = outer(m);
  for (double& v : c.c11.values()) v *= 4.0;
  for (double& v : c.c12.values()) v *= 4.0;
  for (double& v : c.c22.values()) v *= 4.0;
  EXPECT_NEAR(discrepancy_norm(c, m), 3.0, 1e-14);
}

TEST(Series, Interpolation) {
  const TimeSeries s{{0.0, 1.0, 3.0}, {0.0, 2.0, 4.0}};
  EXPECT_DOUBLE_EQ(interpolate(s, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(interpolate(s, 2.0), 3.0);
  EXPECT_DOUBLE_EQ(interpolate(s, 5.0), 4.0);
  EXPECT_DOUBLE_EQ(interpolate(s, 1.0), 2.0);
  const auto cps = discrepancy_checkpoints();
  ASSERT_EQ(cps.size(), 7u);
  EXPECT_DOUBLE_EQ(cps.front(), 0.01);
  EXPECT_DOUBLE_EQ(cps.back(), 0.64);
}

TEST(Series, IdenticalInitialDataStayIdentical) {
  const auto s = diff_series(lookup_test("TestD-g175"), "m01", "m01", 16, 0.2);
  for (double v : s.value) EXPECT_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(s.time.back(), 0.2);
}

TEST(Series, PreparedStartHasZeroDiscrepancy) {
  const auto s = discrepancy_series(lookup_test("TestM"), 16, 0.04);
  EXPECT_EQ(s.value.front(), 0.0);
  for (std::size_t k = 1; k < s.value.size(); ++k) EXPECT_GT(s.value[k], s.value[k - 1]);
}

TEST(Accuracy, RowsAndOrders) {
  StudyOptions o;
  o.t_fin = 0.05;
  const auto rows = richardson_study(lookup_test("TestA"), {8, 16, 32}, o);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_FALSE(rows[0].error.has_value());
  ASSERT_TRUE(rows[1].error.has_value());
  EXPECT_FALSE(rows[1].order.has_value());
  ASSERT_TRUE(rows[2].order.has_value());
  EXPECT_NEAR(*rows[2].order, std::log2(*rows[1].error / *rows[2].error), 1e-15);
  EXPECT_THROW(richardson_study(lookup_test("TestA"), {8, 12}, o), Error);

  const auto single = richardson_study(lookup_test("TestA"), {8}, o);
  EXPECT_FALSE(single[0].error.has_value());
}

TEST(Accuracy, IdenticalRunsAgree) {
  StudyOptions o;
  o.t_fin = 0.05;
  const auto a = run_magnitude(lookup_test("TestB"), 10, o);
  const auto b = run_magnitude(lookup_test("TestB"), 10, o);
  EXPECT_EQ(rel_l2_error(a, b), 0.0);
}
