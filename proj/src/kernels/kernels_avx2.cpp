// Compiled with -mavx2. Every elementwise kernel performs the same IEEE
// operations per lane as the scalar table (no FMA contraction), so results are
// bitwise identical; only `dot` reassociates its sum.
#include <immintrin.h>

#include <cmath>

#include "stencil_cell.hpp"
#include "venation/kernels.hpp"

namespace venation::kernels {
namespace {

constexpr int kW = 4;

void stencil_apply(const StencilView& a, const double* p, double* out) {
  const int n = a.n;
  for (int j = 0; j < n; ++j) {
    const int jm = j > 0 ? j - 1 : 0;
    const int jp = j < n - 1 ? j + 1 : n - 1;
    const std::size_t base = static_cast<std::size_t>(j) * n;
    const double* row = p + base;
    const double* rs = p + static_cast<std::size_t>(jm) * n;
    const double* rn = p + static_cast<std::size_t>(jp) * n;

    out[base] = detail::stencil_cell(a, p, 0, j);
    int i = 1;
    for (; i + kW <= n - 1; i += kW) {
      const std::size_t c = base + i;
      __m256d acc = _mm256_mul_pd(_mm256_loadu_pd(a.coef[kCenter] + c), _mm256_loadu_pd(row + i));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a.coef[kWest] + c), _mm256_loadu_pd(row + i - 1)));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a.coef[kEast] + c), _mm256_loadu_pd(row + i + 1)));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a.coef[kSouth] + c), _mm256_loadu_pd(rs + i)));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a.coef[kNorth] + c), _mm256_loadu_pd(rn + i)));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a.coef[kSouthWest] + c), _mm256_loadu_pd(rs + i - 1)));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a.coef[kSouthEast] + c), _mm256_loadu_pd(rs + i + 1)));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a.coef[kNorthWest] + c), _mm256_loadu_pd(rn + i - 1)));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a.coef[kNorthEast] + c), _mm256_loadu_pd(rn + i + 1)));
      _mm256_storeu_pd(out + c, acc);
    }
    for (; i < n; ++i) out[base + i] = detail::stencil_cell(a, p, i, j);
  }
}

int tridiag_solve(const TridiagBatch& b) {
  const int m = b.positions;
  const std::size_t L = static_cast<std::size_t>(b.lines);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d inf = _mm256_set1_pd(INFINITY);
  int failed = 0;

  std::size_t l = 0;
  for (; l + kW <= L; l += kW) {
    // A lane is good while every pivot is > 0 and < inf (NaN fails both).
    __m256d good = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    __m256d denom = _mm256_loadu_pd(b.diag + l);
    good = _mm256_and_pd(good, _mm256_and_pd(_mm256_cmp_pd(denom, zero, _CMP_GT_OQ),
                                             _mm256_cmp_pd(denom, inf, _CMP_LT_OQ)));
    __m256d cp = _mm256_div_pd(_mm256_loadu_pd(b.sup + l), denom);
    __m256d dp = _mm256_div_pd(_mm256_loadu_pd(b.rhs + l), denom);
    _mm256_storeu_pd(b.scratch_c + l, cp);
    _mm256_storeu_pd(b.scratch_d + l, dp);
    for (int k = 1; k < m; ++k) {
      const std::size_t c = k * L + l;
      const __m256d sub = _mm256_loadu_pd(b.sub + c);
      denom = _mm256_sub_pd(_mm256_loadu_pd(b.diag + c), _mm256_mul_pd(sub, cp));
      good = _mm256_and_pd(good, _mm256_and_pd(_mm256_cmp_pd(denom, zero, _CMP_GT_OQ),
                                               _mm256_cmp_pd(denom, inf, _CMP_LT_OQ)));
      cp = _mm256_div_pd(_mm256_loadu_pd(b.sup + c), denom);
      dp = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(b.rhs + c), _mm256_mul_pd(sub, dp)), denom);
      _mm256_storeu_pd(b.scratch_c + c, cp);
      _mm256_storeu_pd(b.scratch_d + c, dp);
    }
    __m256d xn = dp;
    _mm256_storeu_pd(b.x + (m - 1) * L + l, xn);
    for (int k = m - 2; k >= 0; --k) {
      const std::size_t c = k * L + l;
      xn = _mm256_sub_pd(_mm256_loadu_pd(b.scratch_d + c),
                         _mm256_mul_pd(_mm256_loadu_pd(b.scratch_c + c), xn));
      _mm256_storeu_pd(b.x + c, xn);
    }
    const int mask = _mm256_movemask_pd(good);
    failed += kW - __builtin_popcount(static_cast<unsigned>(mask));
  }

  // Remaining lines: the same recurrence one lane at a time.
  for (; l < L; ++l) {
    bool bad = false;
    double denom = b.diag[l];
    bad |= !(denom > 0.0 && std::isfinite(denom));
    b.scratch_c[l] = b.sup[l] / denom;
    b.scratch_d[l] = b.rhs[l] / denom;
    for (int k = 1; k < m; ++k) {
      const std::size_t c = k * L + l;
      const std::size_t p = c - L;
      denom = b.diag[c] - b.sub[c] * b.scratch_c[p];
      bad |= !(denom > 0.0 && std::isfinite(denom));
      b.scratch_c[c] = b.sup[c] / denom;
      b.scratch_d[c] = (b.rhs[c] - b.sub[c] * b.scratch_d[p]) / denom;
    }
    b.x[(m - 1) * L + l] = b.scratch_d[(m - 1) * L + l];
    for (int k = m - 2; k >= 0; --k) {
      const std::size_t c = k * L + l;
      b.x[c] = b.scratch_d[c] - b.scratch_c[c] * b.x[c + L];
    }
    failed += bad ? 1 : 0;
  }
  return failed;
}

double dot(const double* a, const double* b, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 * kW <= len; k += 2 * kW) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + k + kW), _mm256_loadu_pd(b + k + kW)));
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[kW];
  _mm256_store_pd(lanes, acc0);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; k < len; ++k) s += a[k] * b[k];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t len) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + kW <= len; k += kW)
    _mm256_storeu_pd(y + k, _mm256_add_pd(_mm256_loadu_pd(y + k),
                                          _mm256_mul_pd(va, _mm256_loadu_pd(x + k))));
  for (; k < len; ++k) y[k] += alpha * x[k];
}

void xpby(const double* x, double beta, double* y, std::size_t len) {
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t k = 0;
  for (; k + kW <= len; k += kW)
    _mm256_storeu_pd(y + k, _mm256_add_pd(_mm256_loadu_pd(x + k),
                                          _mm256_mul_pd(vb, _mm256_loadu_pd(y + k))));
  for (; k < len; ++k) y[k] = x[k] + beta * y[k];
}

void mul(const double* a, const double* b, double* out, std::size_t len) {
  std::size_t k = 0;
  for (; k + kW <= len; k += kW)
    _mm256_storeu_pd(out + k, _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
  for (; k < len; ++k) out[k] = a[k] * b[k];
}

}  // namespace

namespace detail {
const KernelTable& avx2_table_impl() {
  static const KernelTable table{"avx2", stencil_apply, tridiag_solve, dot, axpy, xpby, mul};
  return table;
}
}  // namespace detail

}  // namespace venation::kernels
