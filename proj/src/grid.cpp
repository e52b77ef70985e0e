#include "venation/grid.hpp"

#include <cmath>
#include <string>

#include "venation/error.hpp"

namespace venation {

GridSpec::GridSpec(int n) : n_(n), h_(0.0) {
  if (n < 2)
    throw Error(ErrorKind::InvalidGrid,
                "grid needs at least 2 cells per side, got " + std::to_string(n));
  h_ = 1.0 / n;
}

GridSpec make_grid(int n) { return GridSpec(n); }

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b))
    throw Error(ErrorKind::GridMismatch, std::string(what) + ": grids differ (" +
                                             std::to_string(a.n()) + " vs " +
                                             std::to_string(b.n()) + ")");
}

bool ScalarField::all_finite() const noexcept {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

void ScalarField::require_finite(const char* what) const {
  if (!all_finite())
    throw Error(ErrorKind::NonFinite, std::string(what) + " contains NaN or Inf");
}

double ScalarField::mean() const noexcept {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum / static_cast<double>(values_.size());
}

double ScalarField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

ScalarField ScalarField::transposed() const {
  ScalarField out(grid_);
  const int n = grid_.n();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = (*this)(j, i);
  return out;
}

VectorField2::VectorField2(ScalarField a, ScalarField b) : c1(std::move(a)), c2(std::move(b)) {
  require_same_grid(c1.grid(), c2.grid(), "VectorField2");
}

ScalarField VectorField2::magnitude() const {
  ScalarField out(grid());
  auto o = out.values();
  auto a = c1.values();
  auto b = c2.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = std::sqrt(a[k] * a[k] + b[k] * b[k]);
  return out;
}

SymTensorField2::SymTensorField2(ScalarField a, ScalarField b, ScalarField c)
    : c11(std::move(a)), c12(std::move(b)), c22(std::move(c)) {
  require_same_grid(c11.grid(), c12.grid(), "SymTensorField2");
  require_same_grid(c11.grid(), c22.grid(), "SymTensorField2");
}

ScalarField SymTensorField2::frobenius() const {
  ScalarField out(grid());
  auto o = out.values();
  auto a = c11.values();
  auto b = c12.values();
  auto c = c22.values();
  for (std::size_t k = 0; k < o.size(); ++k)
    o[k] = std::sqrt(a[k] * a[k] + 2.0 * b[k] * b[k] + c[k] * c[k]);
  return out;
}

SymTensorField2 outer(const VectorField2& m) {
  SymTensorField2 out(m.grid());
  auto a = m.c1.values();
  auto b = m.c2.values();
  auto o11 = out.c11.values();
  auto o12 = out.c12.values();
  auto o22 = out.c22.values();
  for (std::size_t k = 0; k < a.size(); ++k) {
    o11[k] = a[k] * a[k];
    o12[k] = a[k] * b[k];
    o22[k] = b[k] * b[k];
  }
  return out;
}

namespace {

// Derivative along a line of n values at stride `stride`. dx and dy share this
// so both directions see the same arithmetic.
void line_derivative(const double* f, double* out, int n, std::size_t stride, double h,
                     GradientMode mode) {
  const double inv2h = 1.0 / (2.0 * h);
  for (int k = 1; k < n - 1; ++k)
    out[k * stride] = (f[(k + 1) * stride] - f[(k - 1) * stride]) * inv2h;
  const double edge = mode == GradientMode::kMirror ? inv2h : 1.0 / h;
  out[0] = (f[stride] - f[0]) * edge;
  out[(n - 1) * stride] = (f[(n - 1) * stride] - f[(n - 2) * stride]) * edge;
}

}  // namespace

ScalarField dx(const ScalarField& f, GradientMode mode) {
  ScalarField out(f.grid());
  const int n = f.n();
  for (int j = 0; j < n; ++j)
    line_derivative(f.data() + f.grid().index(0, j), out.data() + f.grid().index(0, j), n, 1,
                    f.grid().h(), mode);
  return out;
}

ScalarField dy(const ScalarField& f, GradientMode mode) {
  ScalarField out(f.grid());
  const int n = f.n();
  for (int i = 0; i < n; ++i)
    line_derivative(f.data() + i, out.data() + i, n, static_cast<std::size_t>(n), f.grid().h(),
                    mode);
  return out;
}

double l2_norm(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v * v;
  const double h = f.grid().h();
  return std::sqrt(h * h * sum);
}

double rel_l2_error(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "rel_l2_error");
  const double denom = l2_norm(b);
  if (denom == 0.0) throw Error(ErrorKind::ZeroDenominator, "rel_l2_error: reference has zero norm");
  double sum = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < av.size(); ++k) sum += (av[k] - bv[k]) * (av[k] - bv[k]);
  const double h = a.grid().h();
  return std::sqrt(h * h * sum) / denom;
}

ScalarField restrict_to_coarse(const ScalarField& fine) {
  const int nf = fine.n();
  if (nf % 2 != 0 || nf / 2 < 2)
    throw Error(ErrorKind::GridMismatch,
                "restrict: fine grid must have an even cell count >= 4, got " + std::to_string(nf));
  ScalarField coarse(GridSpec(nf / 2));
  for (int j = 0; j < nf / 2; ++j)
    for (int i = 0; i < nf / 2; ++i)
      coarse(i, j) = 0.25 * (fine(2 * i, 2 * j) + fine(2 * i + 1, 2 * j) +
                             fine(2 * i, 2 * j + 1) + fine(2 * i + 1, 2 * j + 1));
  return coarse;
}

}  // namespace venation
