#pragma once

#include <algorithm>

#include "venation/kernels.hpp"

namespace venation::kernels::detail {

// One output of the 9-point stencil. Out-of-grid neighbor reads are clamped to
// the edge; the matching coefficient is zero there. The summation order is
// fixed so every kernel variant produces identical results.
inline double stencil_cell(const StencilView& a, const double* p, int i, int j) {
  const int n = a.n;
  const int im = std::max(i - 1, 0), ip = std::min(i + 1, n - 1);
  const int jm = std::max(j - 1, 0), jp = std::min(j + 1, n - 1);
  const std::size_t c = static_cast<std::size_t>(j) * n + i;
  const double* row = p + static_cast<std::size_t>(j) * n;
  const double* rs = p + static_cast<std::size_t>(jm) * n;
  const double* rn = p + static_cast<std::size_t>(jp) * n;
  double acc = a.coef[kCenter][c] * row[i];
  acc += a.coef[kWest][c] * row[im];
  acc += a.coef[kEast][c] * row[ip];
  acc += a.coef[kSouth][c] * rs[i];
  acc += a.coef[kNorth][c] * rn[i];
  acc += a.coef[kSouthWest][c] * rs[im];
  acc += a.coef[kSouthEast][c] * rs[ip];
  acc += a.coef[kNorthWest][c] * rn[im];
  acc += a.coef[kNorthEast][c] * rn[ip];
  return acc;
}

}  // namespace venation::kernels::detail
