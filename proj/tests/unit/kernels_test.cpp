#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "venation/kernels.hpp"

using namespace venation::kernels;

namespace {

std::vector<double> random_vec(std::size_t len, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(len);
  for (double& x : v) x = u(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct RandomStencil {
  int n;
  std::array<std::vector<double>, kStencilSlots> planes;

  RandomStencil(int n_, std::mt19937_64& rng) : n(n_) {
    for (int s = 0; s < kStencilSlots; ++s) {
      planes[s] = random_vec(static_cast<std::size_t>(n) * n, rng);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const int a = i + kSlotOffset[s][0], b = j + kSlotOffset[s][1];
          if (a < 0 || b < 0 || a >= n || b >= n) planes[s][j * n + i] = 0.0;
        }
    }
  }

  StencilView view() const {
    StencilView v{{}, n};
    for (int s = 0; s < kStencilSlots; ++s) v.coef[s] = planes[s].data();
    return v;
  }
};

// Banded system with a dominant diagonal, written line-interleaved.
struct RandomBatch {
  int positions, lines;
  std::vector<double> sub, diag, sup, rhs, x, c, d;

  RandomBatch(int positions_, int lines_, std::mt19937_64& rng) : positions(positions_), lines(lines_) {
    const std::size_t len = static_cast<std::size_t>(positions) * lines;
    sub = random_vec(len, rng);
    sup = random_vec(len, rng);
    diag = random_vec(len, rng, 2.5, 4.0);
    rhs = random_vec(len, rng);
    x.assign(len, 0.0);
    c.assign(len, 0.0);
    d.assign(len, 0.0);
  }

  TridiagBatch batch() {
    return {sub.data(), diag.data(), sup.data(), rhs.data(), x.data(), c.data(), d.data(), positions, lines};
  }
};

std::vector<const KernelTable*> tables() {
  std::vector<const KernelTable*> t{&scalar_table()};
  if (avx2_table()) t.push_back(avx2_table());
  return t;
}

}  // namespace

TEST(Kernels, StencilMatchesDirectSum) {
  std::mt19937_64 rng(11);
  for (int n : {2, 3, 5, 9, 17}) {
    RandomStencil st(n, rng);
    const auto p = random_vec(static_cast<std::size_t>(n) * n, rng);
    std::vector<double> expect(p.size(), 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int s = 0; s < kStencilSlots; ++s) {
          const int a = i + kSlotOffset[s][0], b = j + kSlotOffset[s][1];
          if (a < 0 || b < 0 || a >= n || b >= n) continue;
          expect[j * n + i] += st.planes[s][j * n + i] * p[b * n + a];
        }
    for (const KernelTable* k : tables()) {
      std::vector<double> out(p.size());
      k->stencil_apply(st.view(), p.data(), out.data());
      for (std::size_t c = 0; c < out.size(); ++c) EXPECT_NEAR(out[c], expect[c], 1e-14) << k->name;
    }
  }
}

TEST(Kernels, TridiagMatchesDenseElimination) {
  std::mt19937_64 rng(5);
  RandomBatch rb(7, 3, rng);
  for (const KernelTable* k : tables()) {
    EXPECT_EQ(k->tridiag_solve(rb.batch()), 0);
    // Residual of every line.
    for (int l = 0; l < rb.lines; ++l)
      for (int p = 0; p < rb.positions; ++p) {
        auto at = [&](const std::vector<double>& v, int q) { return v[q * rb.lines + l]; };
        double r = at(rb.diag, p) * at(rb.x, p) - at(rb.rhs, p);
        if (p > 0) r += at(rb.sub, p) * at(rb.x, p - 1);
        if (p + 1 < rb.positions) r += at(rb.sup, p) * at(rb.x, p + 1);
        EXPECT_NEAR(r, 0.0, 1e-13) << k->name;
      }
  }
}

TEST(Kernels, TridiagCountsBadPivots) {
  std::mt19937_64 rng(9);
  for (const KernelTable* k : tables()) {
    RandomBatch rb(6, 11, rng);
    rb.diag[0 * 11 + 2] = 0.0;   // line 2: zero first pivot
    rb.diag[3 * 11 + 7] = -50.0;  // line 7: negative pivot mid-line
    EXPECT_EQ(k->tridiag_solve(rb.batch()), 2) << k->name;
  }
}

// The vector kernels promise the same rounding as the scalar reference for
// every elementwise operation; only the dot product may reassociate.
TEST(KernelEquivalence, Avx2MatchesScalar) {
  const KernelTable* v = avx2_table();
  if (!v) GTEST_SKIP() << "AVX2 unavailable";
  const KernelTable& s = scalar_table();
  std::mt19937_64 rng(2024);

  for (int n : {2, 4, 5, 8, 13, 64, 101}) {
    RandomStencil st(n, rng);
    const auto p = random_vec(static_cast<std::size_t>(n) * n, rng);
    std::vector<double> a(p.size()), b(p.size());
    s.stencil_apply(st.view(), p.data(), a.data());
    v->stencil_apply(st.view(), p.data(), b.data());
    EXPECT_TRUE(bitwise_equal(a, b)) << "stencil n=" << n;
  }

  for (int lines : {1, 3, 4, 7, 8, 33}) {
    RandomBatch r1(19, lines, rng);
    RandomBatch r2 = r1;
    EXPECT_EQ(s.tridiag_solve(r1.batch()), v->tridiag_solve(r2.batch()));
    EXPECT_TRUE(bitwise_equal(r1.x, r2.x)) << "tridiag lines=" << lines;
  }

  for (std::size_t len : {0u, 1u, 3u, 4u, 7u, 1003u}) {
    const auto x = random_vec(len, rng);
    const auto y0 = random_vec(len, rng);
    auto y1 = y0, y2 = y0;
    s.axpy(0.37, x.data(), y1.data(), len);
    v->axpy(0.37, x.data(), y2.data(), len);
    EXPECT_TRUE(bitwise_equal(y1, y2)) << "axpy len=" << len;

    y1 = y0;
    y2 = y0;
    s.xpby(x.data(), -1.3, y1.data(), len);
    v->xpby(x.data(), -1.3, y2.data(), len);
    EXPECT_TRUE(bitwise_equal(y1, y2)) << "xpby len=" << len;

    s.mul(x.data(), y0.data(), y1.data(), len);
    v->mul(x.data(), y0.data(), y2.data(), len);
    EXPECT_TRUE(bitwise_equal(y1, y2)) << "mul len=" << len;

    double mag = 0.0;
    for (std::size_t i = 0; i < len; ++i) mag += std::abs(x[i] * y0[i]);
    EXPECT_NEAR(s.dot(x.data(), y0.data(), len), v->dot(x.data(), y0.data(), len), 1e-15 * (1.0 + mag))
        << "dot len=" << len;
  }
}

TEST(Dispatch, SetActive) {
  const KernelTable& before = active();
  set_active(scalar_table());
  EXPECT_EQ(active().name, scalar_table().name);
  set_active(before);
}
