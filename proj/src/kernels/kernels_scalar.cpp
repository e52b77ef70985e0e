#include <cmath>

#include "stencil_cell.hpp"
#include "venation/kernels.hpp"

namespace venation::kernels {
namespace {

void stencil_apply(const StencilView& a, const double* p, double* out) {
  const int n = a.n;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(j) * n + i] = detail::stencil_cell(a, p, i, j);
}

int tridiag_solve(const TridiagBatch& b) {
  const int m = b.positions;
  const std::size_t L = static_cast<std::size_t>(b.lines);
  int failed = 0;
  for (std::size_t l = 0; l < L; ++l) {
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
  double s = 0.0;
  for (std::size_t k = 0; k < len; ++k) s += a[k] * b[k];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t len) {
  for (std::size_t k = 0; k < len; ++k) y[k] += alpha * x[k];
}

void xpby(const double* x, double beta, double* y, std::size_t len) {
  for (std::size_t k = 0; k < len; ++k) y[k] = x[k] + beta * y[k];
}

void mul(const double* a, const double* b, double* out, std::size_t len) {
  for (std::size_t k = 0; k < len; ++k) out[k] = a[k] * b[k];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", stencil_apply, tridiag_solve, dot, axpy, xpby, mul};
  return table;
}

}  // namespace venation::kernels
