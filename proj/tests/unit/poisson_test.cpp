#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "venation/error.hpp"
#include "venation/poisson.hpp"
#include "support/oracles.hpp"

using namespace venation;
using kernels::StencilSlot;

using namespace venation::oracle;

TEST(Permeability, FromVector) {
  const GridSpec g(3);
  VectorField2 m(g);
  for (double& v : m.c1.values()) v = 1.0;
  for (double& v : m.c2.values()) v = 1.0;
  auto p = permeability_from_m(m, 0.1);
  EXPECT_DOUBLE_EQ(p.p11(1, 1), 1.1);
  EXPECT_DOUBLE_EQ(p.p12(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(p.p22(1, 1), 1.1);

  const double s = std::sqrt(2.0) / 2.0;
  for (double& v : m.c1.values()) v = s;
  for (double& v : m.c2.values()) v = s;
  p = permeability_from_m(m, 0.1);
  EXPECT_NEAR(p.p11(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(p.p12(0, 0), 0.5, 1e-15);

  p = permeability_from_m(VectorField2(g), 0.1);
  EXPECT_EQ(p.p11(2, 2), 0.1);
  EXPECT_EQ(p.p12(2, 2), 0.0);
  EXPECT_THROW(permeability_from_m(m, 0.0), Error);
}

TEST(Permeability, FromTensor) {
  const GridSpec g(3);
  SymTensorField2 c(g);
  auto p = permeability_from_c(c, 0.1);
  EXPECT_EQ(p.p11(0, 0), 0.1);
  EXPECT_EQ(p.p22(0, 0), 0.1);
  for (double& v : c.c11.values()) v = 1.0;
  for (double& v : c.c22.values()) v = 1.0;
  p = permeability_from_c(c, 0.1);
  EXPECT_DOUBLE_EQ(p.p11(1, 2), 1.1);
  EXPECT_EQ(p.p12(1, 2), 0.0);
  EXPECT_DOUBLE_EQ(p.p22(1, 2), 1.1);
}

TEST(Assembly, IdentityGivesFivePointLaplacian) {
  const GridSpec g(6);
  const auto op = assemble(permeability_from_c(SymTensorField2(g), 1.0));
  const double k = 1.0 / (g.h() * g.h());
  EXPECT_NEAR(op.coef(kernels::kCenter, 2, 3), 4 * k, 1e-9);
  for (int s : {kernels::kWest, kernels::kEast, kernels::kSouth, kernels::kNorth})
    EXPECT_NEAR(op.coef(s, 2, 3), -k, 1e-9);
  for (int s : {kernels::kSouthWest, kernels::kSouthEast, kernels::kNorthWest, kernels::kNorthEast})
    EXPECT_EQ(op.coef(s, 2, 3), 0.0);
  // Corner cell: two faces carry flux.
  EXPECT_NEAR(op.coef(kernels::kCenter, 0, 0), 2 * k, 1e-9);
  EXPECT_EQ(op.coef(kernels::kWest, 0, 0), 0.0);
  EXPECT_TRUE(op.is_symmetric());
}

TEST(Assembly, NoMixedTermNoCorners) {
  const GridSpec g(7);
  std::mt19937_64 rng(3);
  auto perm = random_perm(g, rng);
  for (double& v : perm.p12.values()) v = 0.0;
  const auto op = assemble(perm);
  for (int j = 0; j < 7; ++j)
    for (int i = 0; i < 7; ++i)
      for (int s : {kernels::kSouthWest, kernels::kSouthEast, kernels::kNorthWest, kernels::kNorthEast})
        EXPECT_EQ(op.coef(s, i, j), 0.0);
}

TEST(Assembly, RowAndColumnSumsVanish) {
  std::mt19937_64 rng(8);
  const GridSpec g(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto op = assemble(random_perm(g, rng));
    const double scale = op.max_abs_coef();
    std::vector<double> col(g.size(), 0.0);
    for (std::size_t r = 0; r < g.size(); ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < g.size(); ++c) {
        row += op.entry(r, c);
        col[c] += op.entry(r, c);
      }
      EXPECT_LE(std::abs(row), 1e-12 * scale);
    }
    for (double v : col) EXPECT_LE(std::abs(v), 1e-12 * scale);
  }
}

TEST(Assembly, ApplyMatchesFaceFluxes) {
  std::mt19937_64 rng(21);
  for (int n : {2, 3, 9}) {
    const GridSpec g(n);
    const auto perm = random_perm(g, rng);
    const auto p = random_source(g, rng);
    const auto op = assemble(perm);
    const auto a = op.apply(p);
    const auto b = face_flux_apply(perm, p);
    for (std::size_t k = 0; k < g.size(); ++k)
      EXPECT_NEAR(a.values()[k], b.values()[k], 1e-11 * op.max_abs_coef());
  }
}

TEST(Assembly, MixedTermBreaksSymmetry) {
  std::mt19937_64 rng(4);
  const auto op = assemble(random_perm(GridSpec(8), rng));
  EXPECT_GT(op.asymmetry(), 1e-6);
  EXPECT_FALSE(op.is_symmetric());
}

TEST(Assembly, SwapSymmetricInputGivesSwapSymmetricOutput) {
  const GridSpec g(10);
  std::mt19937_64 rng(13);
  auto perm = random_perm(g, rng);
  // Symmetrize: P11(x,y) = P22(y,x), P12(x,y) = P12(y,x).
  for (int j = 0; j < 10; ++j)
    for (int i = 0; i < 10; ++i) {
      perm.p22(j, i) = perm.p11(i, j);
      if (i < j) perm.p12(j, i) = perm.p12(i, j);
    }
  ScalarField p = random_source(g, rng);
  for (int j = 0; j < 10; ++j)
    for (int i = 0; i < j; ++i) p(j, i) = p(i, j);
  const auto a = assemble(perm).apply(p);
  for (int j = 0; j < 10; ++j)
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(a(i, j), a(j, i), 1e-9);
}

TEST(Assembly, RejectsLostEllipticity) {
  const GridSpec g(4);
  auto perm = permeability_from_c(SymTensorField2(g), 0.1);
  perm.p11(1, 2) = -0.5;
  try {
    assemble(perm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Assembly);
  }
}

TEST(Solve, ZeroSourceGivesZero) {
  const GridSpec g(6);
  std::mt19937_64 rng(1);
  const auto op = assemble(random_perm(g, rng));
  const auto p = solve_pressure(op, ScalarField(g), 1e-10);
  EXPECT_EQ(p.max_abs(), 0.0);
}

TEST(Solve, MatchesDenseOracleForEveryMethod) {
  std::mt19937_64 rng(77);
  for (int n : {8, 12}) {
    const GridSpec g(n);
    const auto op = assemble(random_perm(g, rng));
    const auto s = random_source(g, rng);
    const auto ref = dense_pin_and_shift(op, s);
    for (auto m : {SolverMethod::kAuto, SolverMethod::kGmres, SolverMethod::kSparseLu,
                   SolverMethod::kBiCgStab}) {
      PressureOptions o;
      o.tol = 1e-13;
      o.method = m;
      const auto sol = solve_pressure(op, s, o);
      EXPECT_LE(rel_l2_error(sol.p, ref), 1e-10) << to_string(m) << " n=" << n;
      EXPECT_LE(std::abs(sol.p.mean()), 1e-14);
    }
  }
}

TEST(Solve, SymmetricStencilUsesCg) {
  const GridSpec g(12);
  std::mt19937_64 rng(2);
  const auto op = assemble(permeability_from_c(SymTensorField2(g), 1.0));
  const auto s = random_source(g, rng);
  PressureOptions o;
  o.tol = 1e-13;
  const auto sol = solve_pressure(op, s, o);
  EXPECT_EQ(sol.method, SolverMethod::kCg);
  EXPECT_LE(rel_l2_error(sol.p, dense_pin_and_shift(op, s)), 1e-10);
}

TEST(Solve, ManufacturedSolutionSecondOrder) {
  const double pi = std::numbers::pi;
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    const GridSpec g(n);
    const auto exact = ScalarField::from_function(g, [&](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
    ScalarField s(g);
    for (std::size_t k = 0; k < g.size(); ++k) s.values()[k] = 2 * pi * pi * exact.values()[k];
    const auto op = assemble(permeability_from_c(SymTensorField2(g), 1.0));
    err.push_back(rel_l2_error(solve_pressure(op, s, 1e-12), exact));
  }
  for (std::size_t k = 1; k < err.size(); ++k) EXPECT_NEAR(std::log2(err[k - 1] / err[k]), 2.0, 0.2);
}

TEST(Solve, IncompatibleSourceRejected) {
  const GridSpec g(6);
  const auto op = assemble(permeability_from_c(SymTensorField2(g), 1.0));
  try {
    solve_pressure(op, ScalarField(g, 1.0), 1e-10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IncompatibleSource);
  }
}

TEST(Solve, IterationCapReported) {
  const GridSpec g(16);
  std::mt19937_64 rng(6);
  const auto op = assemble(random_perm(g, rng));
  PressureOptions o;
  o.tol = 1e-14;
  o.max_iterations = 2;
  o.method = SolverMethod::kGmres;
  try {
    solve_pressure(op, random_source(g, rng), o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotConverged);
  }
}

TEST(Source, ZeroMeanAndPeak) {
  const GridSpec g(600);
  const auto s = make_source(g, 1000.0, {0.1, 0.1});
  EXPECT_LE(std::abs(s.mean()), 1e-15);
  int bi = 0, bj = 0;
  for (int j = 0; j < 600; ++j)
    for (int i = 0; i < 600; ++i)
      if (s(i, j) > s(bi, bj)) bi = i, bj = j;
  // 0.1 sits on the face between cells 59 and 60.
  EXPECT_TRUE(bi == 59 || bi == 60);
  EXPECT_TRUE(bj == 59 || bj == 60);
}

TEST(Source, FlatLimitVanishes) {
  const auto s = make_source(GridSpec(8), 1e-20, {0.1, 0.1});
  EXPECT_LE(s.max_abs(), 1e-15);
  EXPECT_THROW(make_source(GridSpec(8), 0.0, {0.1, 0.1}), Error);
}
