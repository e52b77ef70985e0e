#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "venation/dynamics.hpp"
#include "venation/error.hpp"
#include "venation/poisson.hpp"

using namespace venation;

namespace {

VectorField2 constant_m(const GridSpec& g, double a, double b) {
  VectorField2 m(g);
  for (double& v : m.c1.values()) v = a;
  for (double& v : m.c2.values()) v = b;
  return m;
}

SystemParams unit_params() {
  SystemParams p;
  p.diffusivity = 0.3;
  p.activation = 2.0;
  p.metabolic_rate = 0.5;
  p.metabolic_exp = 0.75;
  p.background = 0.1;
  p.regularization = 0.01;
  return p;
}

}  // namespace

TEST(Metabolic, VectorCoefficient) {
  const GridSpec g(3);
  EXPECT_EQ(metabolic_coeff_m(constant_m(g, 0.3, -2.0), 1.0)(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(metabolic_coeff_m(constant_m(g, 0.0, 4.0), 0.75)(0, 2), 0.5);
  // |m| = 0 with gamma < 1 uses the 1e-14 floor: (1e-14)^-0.5.
  EXPECT_NEAR(metabolic_coeff_m(VectorField2(g), 0.75)(1, 1), 1e7, 1e-6);
  // Above gamma = 1 zero stays zero.
  EXPECT_EQ(metabolic_coeff_m(VectorField2(g), 1.75)(1, 1), 0.0);
}

TEST(Metabolic, TensorCoefficient) {
  const GridSpec g(3);
  SymTensorField2 c(g);
  for (double& v : c.c11.values()) v = 1.0;
  EXPECT_NEAR(metabolic_coeff_c(c, 1.75, 0.1)(1, 1), 0.976454, 1e-6);
  EXPECT_EQ(metabolic_coeff_c(c, 2.0, 0.1)(1, 1), 1.0);
  EXPECT_NEAR(metabolic_coeff_c(SymTensorField2(g), 0.75, 1e-3)(0, 0), 5623.41, 1e-2);
  try {
    metabolic_coeff_c(SymTensorField2(g), 0.75, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularCoefficient);
  }
}

TEST(Activation, Products) {
  const GridSpec g(8);
  auto a = activation_terms(ScalarField(g, 2.0), GradientMode::kMirror);
  EXPECT_EQ(a.px2.max_abs() + a.py2.max_abs() + a.pxy.max_abs(), 0.0);

  a = activation_terms(ScalarField::from_function(g, [](double x, double) { return x; }), GradientMode::kMirror);
  EXPECT_NEAR(a.px2(3, 4), 1.0, 1e-13);
  EXPECT_EQ(a.py2(3, 4), 0.0);
  EXPECT_EQ(a.pxy(3, 4), 0.0);

  a = activation_terms(ScalarField::from_function(g, [](double x, double y) { return x + y; }),
                       GradientMode::kMirror);
  EXPECT_NEAR(a.px2(3, 4), 1.0, 1e-13);
  EXPECT_NEAR(a.py2(3, 4), 1.0, 1e-13);
  EXPECT_NEAR(a.pxy(3, 4), 1.0, 1e-13);
}

TEST(Energy, ZeroStateIsZero) {
  const GridSpec g(6);
  const auto p = unit_params();
  EXPECT_EQ(energy_vect(VectorField2(g), ScalarField(g), p), 0.0);
  EXPECT_EQ(energy_tens(SymTensorField2(g), ScalarField(g), p), 0.0);
}

TEST(Energy, BackgroundTermOnly) {
  const GridSpec g(16);
  const auto params = unit_params();
  const auto s = make_source(g, 50.0, {0.3, 0.6});
  const auto p = solve_pressure(assemble(permeability_from_m(VectorField2(g), params.background)), s, 1e-12);
  const auto gx = dx(p);
  const auto gy = dy(p);
  double sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    sum += gx.values()[k] * gx.values()[k] + gy.values()[k] * gy.values()[k];
  const double expect = params.activation * params.activation * g.h() * g.h() * params.background * sum;
  EXPECT_GT(expect, 0.0);
  EXPECT_NEAR(energy_vect(VectorField2(g), p, params), expect, 1e-12 * expect);
}

// Hand evaluation of every term on a 3x3 grid.
TEST(Energy, VectorTermsByHand) {
  const GridSpec g(3);
  SystemParams params = unit_params();
  VectorField2 m(g);
  ScalarField p(g);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    m.c1.values()[k] = u(rng);
    m.c2.values()[k] = u(rng);
    p.values()[k] = u(rng);
  }
  const double h = g.h();
  auto d = [&](const ScalarField& f, int i, int j, bool along_x) {
    auto at = [&](int a, int b) { return f(std::clamp(a, 0, 2), std::clamp(b, 0, 2)); };
    return along_x ? (at(i + 1, j) - at(i - 1, j)) / (2 * h) : (at(i, j + 1) - at(i, j - 1)) / (2 * h);
  };
  double e = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      const double px = d(p, i, j, true), py = d(p, i, j, false);
      const double m1 = m.c1(i, j), m2 = m.c2(i, j);
      const double grad_m = std::pow(d(m.c1, i, j, true), 2) + std::pow(d(m.c1, i, j, false), 2) +
                            std::pow(d(m.c2, i, j, true), 2) + std::pow(d(m.c2, i, j, false), 2);
      e += params.diffusivity * params.diffusivity * grad_m +
           params.activation * params.activation *
               (params.background * (px * px + py * py) + std::pow(m1 * px + m2 * py, 2)) +
           params.metabolic_rate / params.metabolic_exp * std::pow(m1 * m1 + m2 * m2, params.metabolic_exp);
    }
  EXPECT_NEAR(energy_vect(m, p, params), h * h * e, 1e-12);
}

TEST(Energy, TensorConstantHasNoDirichletTerm) {
  const GridSpec g(5);
  SystemParams params = unit_params();
  SymTensorField2 c(g);
  for (double& v : c.c11.values()) v = 0.7;
  for (double& v : c.c12.values()) v = 0.2;
  for (double& v : c.c22.values()) v = 0.4;
  const ScalarField p(g);
  const double fro = std::sqrt(0.49 + 2 * 0.04 + 0.16);
  const double expect = 25 * g.h() * g.h() * params.metabolic_rate / params.metabolic_exp *
                        std::pow(fro, params.metabolic_exp);
  EXPECT_NEAR(energy_tens(c, p, params), expect, 1e-14);
  params.diffusivity = 0.0;
  EXPECT_NEAR(energy_tens(c, p, params), expect, 1e-14);
}

TEST(Energy, MatchedStatesAgree) {
  // With C = m (x) m and matched constants the activation terms coincide.
  const GridSpec g(6);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  VectorField2 m(g);
  ScalarField p(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    m.c1.values()[k] = u(rng);
    m.c2.values()[k] = u(rng);
    p.values()[k] = u(rng);
  }
  SystemParams a = unit_params();
  a.diffusivity = 0.0;
  a.metabolic_rate = 0.0;
  EXPECT_NEAR(energy_vect(m, p, a), energy_tens(outer(m), p, a), 1e-12);
}

TEST(Flux, Basics) {
  const GridSpec g(6);
  const auto px = ScalarField::from_function(g, [](double x, double) { return x; });
  auto f = flux(SymTensorField2(g), px, GradientMode::kMirror);
  EXPECT_EQ(f.magnitude.max_abs(), 0.0);

  SymTensorField2 id(g);
  for (double& v : id.c11.values()) v = 1.0;
  for (double& v : id.c22.values()) v = 1.0;
  f = flux(id, px, GradientMode::kMirror);
  EXPECT_NEAR(f.components.c1(2, 3), 1.0, 1e-13);
  EXPECT_EQ(f.components.c2(2, 3), 0.0);
  EXPECT_NEAR(f.magnitude(2, 3), 1.0, 1e-13);
}

TEST(Flux, MagnitudeSwapInvariant) {
  const GridSpec g(7);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1, 1);
  SymTensorField2 c(g);
  ScalarField p(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    c.c11.values()[k] = u(rng);
    c.c12.values()[k] = u(rng);
    c.c22.values()[k] = u(rng);
    p.values()[k] = u(rng);
  }
  const SymTensorField2 swapped(c.c22.transposed(), c.c12.transposed(), c.c11.transposed());
  const auto a = flux(c, p, GradientMode::kMirror).magnitude;
  const auto b = flux(swapped, p.transposed(), GradientMode::kMirror).magnitude;
  for (int j = 0; j < 7; ++j)
    for (int i = 0; i < 7; ++i) EXPECT_NEAR(a(i, j), b(j, i), 1e-13);
}

TEST(Params, Validation) {
  SystemParams p = unit_params();
  EXPECT_NO_THROW(validate(p, true));
  p.regularization = 0.0;
  EXPECT_NO_THROW(validate(p, false));
  EXPECT_THROW(validate(p, true), Error);
  p.metabolic_exp = 2.5;
  EXPECT_NO_THROW(validate(p, true));
  p.background = 0.0;
  EXPECT_THROW(validate(p, false), Error);
}
