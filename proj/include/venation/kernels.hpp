#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace venation::kernels {

// Offsets of the 9-point stencil slots, as (di, dj).
enum StencilSlot : int {
  kCenter = 0,
  kWest,
  kEast,
  kSouth,
  kNorth,
  kSouthWest,
  kSouthEast,
  kNorthWest,
  kNorthEast,
  kStencilSlots
};

inline constexpr std::array<std::array<int, 2>, kStencilSlots> kSlotOffset = {{
    {0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}, {-1, -1}, {1, -1}, {-1, 1}, {1, 1}}};

/// Read-only view of per-cell stencil coefficients, one n*n plane per slot.
/// Coefficients that would reach outside the grid must be zero.
struct StencilView {
  std::array<const double*, kStencilSlots> coef;
  int n;
};

/// Batched tridiagonal systems laid out line-interleaved: entry k of line l is
/// at [k * lines + l]. `sub[0]` and `sup[positions-1]` are ignored.
struct TridiagBatch {
  const double* sub;
  const double* diag;
  const double* sup;
  const double* rhs;
  double* x;
  double* scratch_c;  // positions * lines
  double* scratch_d;  // positions * lines
  int positions;
  int lines;
};

struct KernelTable {
  std::string_view name;

  /// out = A p for the 9-point stencil.
  void (*stencil_apply)(const StencilView& a, const double* p, double* out);

  /// Thomas elimination on every line. Returns the number of lines that met a
  /// pivot that is not strictly positive and finite; their x is unspecified.
  int (*tridiag_solve)(const TridiagBatch& batch);

  double (*dot)(const double* a, const double* b, std::size_t len);
  /// y += alpha x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t len);
  /// y = x + beta y
  void (*xpby)(const double* x, double beta, double* y, std::size_t len);
  /// out = a * b elementwise
  void (*mul)(const double* a, const double* b, double* out, std::size_t len);
};

const KernelTable& scalar_table();

/// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table();

/// Kernels used by the solvers. Defaults to AVX2 when available; the
/// VENATION_KERNELS environment variable ("scalar" or "avx2") overrides.
const KernelTable& active();

/// Replace the active table (tests and benchmarks). Not thread-safe.
void set_active(const KernelTable& table);

}  // namespace venation::kernels
