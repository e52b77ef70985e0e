#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace venation {

/// Uniform cell-centered mesh on the unit square with n cells per side.
///
/// Cells are addressed with zero-based (i, j), i along x and j along y. The
/// center of cell (i, j) is ((i + 1/2) h, (j + 1/2) h). Storage is row-major
/// with i fastest: index = j * n + i.
class GridSpec {
 public:
  /// Throws Error(InvalidGrid) when n < 2.
  explicit GridSpec(int n);

  int n() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }

  double x(int i) const noexcept { return (i + 0.5) * h_; }
  double y(int j) const noexcept { return (j + 0.5) * h_; }

  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * n_ + i;
  }

  bool is_boundary(int i, int j) const noexcept {
    return i == 0 || j == 0 || i == n_ - 1 || j == n_ - 1;
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept {
    return a.n_ == b.n_;
  }

 private:
  int n_;
  double h_;
};

GridSpec make_grid(int n);

class ScalarField {
 public:
  explicit ScalarField(const GridSpec& grid, double value = 0.0)
      : grid_(grid), values_(grid.size(), value) {}

  template <class F>
  static ScalarField from_function(const GridSpec& grid, F&& f) {
    ScalarField out(grid);
    for (int j = 0; j < grid.n(); ++j)
      for (int i = 0; i < grid.n(); ++i) out(i, j) = f(grid.x(i), grid.y(j));
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  int n() const noexcept { return grid_.n(); }

  double& operator()(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  bool all_finite() const noexcept;
  /// Throws Error(NonFinite) naming `what` if any value is NaN or infinite.
  void require_finite(const char* what) const;

  double mean() const noexcept;
  double max_abs() const noexcept;

  /// Field with x and y roles exchanged: out(i, j) = in(j, i).
  ScalarField transposed() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

struct VectorField2 {
  ScalarField c1;
  ScalarField c2;

  explicit VectorField2(const GridSpec& grid) : c1(grid), c2(grid) {}
  VectorField2(ScalarField a, ScalarField b);

  const GridSpec& grid() const noexcept { return c1.grid(); }
  ScalarField magnitude() const;
};

/// Symmetric 2x2 tensor field; the (2,1) entry is implied by c12.
struct SymTensorField2 {
  ScalarField c11;
  ScalarField c12;
  ScalarField c22;

  explicit SymTensorField2(const GridSpec& grid) : c11(grid), c12(grid), c22(grid) {}
  SymTensorField2(ScalarField a, ScalarField b, ScalarField c);

  const GridSpec& grid() const noexcept { return c11.grid(); }
  /// Pointwise Frobenius norm sqrt(c11^2 + 2 c12^2 + c22^2).
  ScalarField frobenius() const;
};

/// Outer product m (x) m.
SymTensorField2 outer(const VectorField2& m);

/// Boundary treatment for first derivatives on the outermost cells.
enum class GradientMode {
  kMirror,    ///< ghost equals the adjacent cell: (f1 - f0) / 2h
  kOneSided,  ///< first-order one-sided difference: (f1 - f0) / h
};

ScalarField dx(const ScalarField& f, GradientMode mode = GradientMode::kMirror);
ScalarField dy(const ScalarField& f, GradientMode mode = GradientMode::kMirror);

/// Midpoint-rule L2 norm sqrt(h^2 sum f^2).
double l2_norm(const ScalarField& f);

/// ||a - b||_2 / ||b||_2.
double rel_l2_error(const ScalarField& a, const ScalarField& b);

/// 2x2 block average from a grid with 2n cells per side onto n.
ScalarField restrict_to_coarse(const ScalarField& fine);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

}  // namespace venation
