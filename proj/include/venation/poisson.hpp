#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "venation/grid.hpp"
#include "venation/kernels.hpp"

namespace venation {

/// Pointwise entries of the permeability tensor P = rI + C (or rI + m (x) m).
struct PermeabilityField {
  ScalarField p11;
  ScalarField p12;
  ScalarField p22;
  double background;

  const GridSpec& grid() const noexcept { return p11.grid(); }
};

PermeabilityField permeability_from_m(const VectorField2& m, double background);
PermeabilityField permeability_from_c(const SymTensorField2& c, double background);

/// Conservative 9-point discretization of -div(P grad p) with zero total flux
/// through every boundary face.
///
/// Each interior face carries one flux built from the face-averaged tensor
/// entries: the normal part as a two-point difference and the tangential part
/// as the average of the two adjacent cells' central differences. Tangential
/// differences on boundary-adjacent rows mirror the cell across the wall.
/// Cells add and subtract the same face flux, so the operator annihilates
/// constants and h^2 * sum(A p) vanishes for every p.
class PoissonOperator {
 public:
  const GridSpec& grid() const noexcept { return grid_; }

  kernels::StencilView view() const noexcept;

  double coef(int slot, int i, int j) const noexcept {
    return coef_[slot][grid_.index(i, j)];
  }

  /// Matrix entry A(row, col) in natural (j * n + i) ordering; zero when the
  /// two cells are not stencil neighbors.
  double entry(std::size_t row, std::size_t col) const noexcept;

  /// Largest |A(a,b) - A(b,a)| over all stencil pairs, relative to max |A|.
  double asymmetry() const noexcept { return asymmetry_; }
  bool is_symmetric() const noexcept { return symmetric_; }

  double max_abs_coef() const noexcept { return max_abs_; }

  ScalarField apply(const ScalarField& p) const;
  void apply(const double* p, double* out) const;

  /// Diagonal entries.
  std::span<const double> diagonal() const noexcept { return coef_[kernels::kCenter]; }

 private:
  friend PoissonOperator assemble(const PermeabilityField& perm);
  explicit PoissonOperator(const GridSpec& grid);

  GridSpec grid_;
  std::array<std::vector<double>, kernels::kStencilSlots> coef_;
  double asymmetry_ = 0.0;
  double max_abs_ = 0.0;
  bool symmetric_ = false;
};

/// Throws Error(Assembly) if p11 or p22 is not strictly positive somewhere.
PoissonOperator assemble(const PermeabilityField& perm);

/// Relative tolerance below which the stencil counts as symmetric.
inline constexpr double kSymmetryTolerance = 1e-13;

enum class SolverMethod {
  kAuto,      ///< CG for a symmetric stencil, sparse LU otherwise
  kCg,        ///< Jacobi-preconditioned conjugate gradients
  kBiCgStab,  ///< Jacobi-preconditioned
  kGmres,     ///< restarted, right Jacobi preconditioning
  kSparseLu,  ///< GMRES preconditioned by a sparse LU with one pinned unknown
};

const char* to_string(SolverMethod method);

/// Krylov dimension between GMRES restarts.
inline constexpr int kGmresRestart = 60;

/// Factorization carried between solves of slowly varying operators on one
/// grid. A stale factorization preconditions GMRES until that needs more than
/// kStaleIterations iterations, then it is recomputed.
class PressureCache {
 public:
  PressureCache();
  ~PressureCache();
  PressureCache(const PressureCache&) = delete;
  PressureCache& operator=(const PressureCache&) = delete;

  int factorizations() const noexcept;

  struct Impl;
  Impl& impl() noexcept { return *impl_; }

 private:
  std::unique_ptr<Impl> impl_;
};

inline constexpr int kStaleIterations = 25;

struct PressureOptions {
  double tol = 1e-10;
  SolverMethod method = SolverMethod::kAuto;
  /// 0 selects the default cap of 50 * n iterations.
  int max_iterations = 0;
  /// Starting iterate; reused between time steps.
  const ScalarField* initial_guess = nullptr;
  /// Reused factorization for the sparse-LU path; a local one when null.
  PressureCache* cache = nullptr;
};

struct PressureSolution {
  ScalarField p;
  int iterations = 0;
  double relative_residual = 0.0;
  SolverMethod method = SolverMethod::kAuto;
};

/// Solves A p = S to ||A p - S|| <= tol ||S|| and returns the zero-mean
/// representative. Jacobi-preconditioned CG when the stencil is symmetric,
/// LU-preconditioned GMRES otherwise: for the strongly
/// anisotropic tensors of the network runs the nonsymmetric stencil has a
/// spectrum far from the real axis and Jacobi-preconditioned BiCGStab and
/// GMRES stall. Iterates are projected to zero mean.
///
/// Throws Error(IncompatibleSource) when |mean(S)| > 1e-12 max(1, max|S|) and
/// Error(NotConverged) when the iteration cap is hit.
PressureSolution solve_pressure(const PoissonOperator& op, const ScalarField& source,
                                const PressureOptions& options);

ScalarField solve_pressure(const PoissonOperator& op, const ScalarField& source, double tol);

inline constexpr double kSourceMeanTolerance = 1e-12;

/// Gaussian bump exp(-sigma |x - x0|^2) minus its discrete mean.
ScalarField make_source(const GridSpec& grid, double sigma, std::array<double, 2> center);

}  // namespace venation
