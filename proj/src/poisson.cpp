#include "venation/poisson.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <functional>
#include <cmath>
#include <string>

#include "venation/error.hpp"

namespace venation {

PermeabilityField permeability_from_m(const VectorField2& m, double background) {
  if (!(background > 0.0))
    throw Error(ErrorKind::InvalidParameter, "background permeability must be positive");
  const GridSpec& g = m.grid();
  PermeabilityField perm{ScalarField(g), ScalarField(g), ScalarField(g), background};
  auto a = m.c1.values();
  auto b = m.c2.values();
  auto p11 = perm.p11.values();
  auto p12 = perm.p12.values();
  auto p22 = perm.p22.values();
  for (std::size_t k = 0; k < a.size(); ++k) {
    p11[k] = background + a[k] * a[k];
    p12[k] = a[k] * b[k];
    p22[k] = background + b[k] * b[k];
  }
  return perm;
}

PermeabilityField permeability_from_c(const SymTensorField2& c, double background) {
  if (!(background > 0.0))
    throw Error(ErrorKind::InvalidParameter, "background permeability must be positive");
  const GridSpec& g = c.grid();
  PermeabilityField perm{ScalarField(g), ScalarField(g), ScalarField(g), background};
  auto c11 = c.c11.values();
  auto c12 = c.c12.values();
  auto c22 = c.c22.values();
  auto p11 = perm.p11.values();
  auto p12 = perm.p12.values();
  auto p22 = perm.p22.values();
  for (std::size_t k = 0; k < c11.size(); ++k) {
    p11[k] = background + c11[k];
    p12[k] = c12[k];
    p22[k] = background + c22[k];
  }
  return perm;
}

// ---------------------------------------------------------------------------

namespace {

using kernels::kSlotOffset;
using kernels::kStencilSlots;

int slot_of(int di, int dj) {
  for (int s = 0; s < kStencilSlots; ++s)
    if (kSlotOffset[s][0] == di && kSlotOffset[s][1] == dj) return s;
  return -1;
}

struct Weight {
  int i, j;
  double w;
};

}  // namespace

PoissonOperator::PoissonOperator(const GridSpec& grid) : grid_(grid) {
  for (auto& plane : coef_) plane.assign(grid.size(), 0.0);
}

kernels::StencilView PoissonOperator::view() const noexcept {
  kernels::StencilView v{};
  for (int s = 0; s < kStencilSlots; ++s) v.coef[s] = coef_[s].data();
  v.n = grid_.n();
  return v;
}

double PoissonOperator::entry(std::size_t row, std::size_t col) const noexcept {
  const int n = grid_.n();
  const int i = static_cast<int>(row % n), j = static_cast<int>(row / n);
  const int ic = static_cast<int>(col % n), jc = static_cast<int>(col / n);
  const int di = ic - i, dj = jc - j;
  if (std::abs(di) > 1 || std::abs(dj) > 1) return 0.0;
  return coef_[slot_of(di, dj)][row];
}

void PoissonOperator::apply(const double* p, double* out) const {
  kernels::active().stencil_apply(view(), p, out);
}

ScalarField PoissonOperator::apply(const ScalarField& p) const {
  require_same_grid(grid_, p.grid(), "PoissonOperator::apply");
  ScalarField out(grid_);
  apply(p.data(), out.data());
  return out;
}

PoissonOperator assemble(const PermeabilityField& perm) {
  const GridSpec& g = perm.grid();
  require_same_grid(g, perm.p12.grid(), "assemble");
  require_same_grid(g, perm.p22.grid(), "assemble");
  const int n = g.n();
  const double h = g.h();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (!(perm.p11(i, j) > 0.0) || !(perm.p22(i, j) > 0.0) || !std::isfinite(perm.p12(i, j)))
        throw Error(ErrorKind::Assembly, "non-positive diagonal permeability at cell (" +
                                             std::to_string(i) + "," + std::to_string(j) +
                                             "): ellipticity lost");

  PoissonOperator op(g);
  auto add = [&](int ri, int rj, const Weight* ws, int count, double sign) {
    const std::size_t row = g.index(ri, rj);
    for (int k = 0; k < count; ++k) {
      const int s = slot_of(ws[k].i - ri, ws[k].j - rj);
      op.coef_[s][row] += sign * ws[k].w;
    }
  };

  const double inv_h2 = 1.0 / (h * h);
  const double inv_8h2 = 1.0 / (8.0 * h * h);

  // x-faces between (i, j) and (i+1, j). The face flux q = (P grad p)_x times
  // 1/h is subtracted from the left cell and added to the right cell.
  for (int j = 0; j < n; ++j) {
    const int jm = std::max(j - 1, 0), jp = std::min(j + 1, n - 1);
    for (int i = 0; i + 1 < n; ++i) {
      const double kxx = (perm.p11(i, j) + perm.p11(i + 1, j)) * 0.5 * inv_h2;
      const double kxy = (perm.p12(i, j) + perm.p12(i + 1, j)) * inv_8h2;
      const Weight ws[6] = {{i + 1, j, kxx},   {i, j, -kxx},      {i, jp, kxy},
                            {i, jm, -kxy},     {i + 1, jp, kxy},  {i + 1, jm, -kxy}};
      add(i, j, ws, 6, -1.0);
      add(i + 1, j, ws, 6, 1.0);
    }
  }
  // y-faces between (i, j) and (i, j+1), mirror image of the above.
  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int im = std::max(i - 1, 0), ip = std::min(i + 1, n - 1);
      const double kyy = (perm.p22(i, j) + perm.p22(i, j + 1)) * 0.5 * inv_h2;
      const double kxy = (perm.p12(i, j) + perm.p12(i, j + 1)) * inv_8h2;
      const Weight ws[6] = {{i, j + 1, kyy},   {i, j, -kyy},      {ip, j, kxy},
                            {im, j, -kxy},     {ip, j + 1, kxy},  {im, j + 1, -kxy}};
      add(i, j, ws, 6, -1.0);
      add(i, j + 1, ws, 6, 1.0);
    }
  }

  double max_abs = 0.0;
  for (const auto& plane : op.coef_)
    for (double v : plane) max_abs = std::max(max_abs, std::abs(v));
  double asym = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int s = 1; s < kStencilSlots; ++s) {
        const int ni = i + kSlotOffset[s][0], nj = j + kSlotOffset[s][1];
        if (ni < 0 || nj < 0 || ni >= n || nj >= n) continue;
        const int back = slot_of(-kSlotOffset[s][0], -kSlotOffset[s][1]);
        asym = std::max(asym, std::abs(op.coef_[s][g.index(i, j)] - op.coef_[back][g.index(ni, nj)]));
      }
  op.max_abs_ = max_abs;
  op.asymmetry_ = max_abs > 0.0 ? asym / max_abs : 0.0;
  op.symmetric_ = op.asymmetry_ <= kSymmetryTolerance;
  return op;
}

// ---------------------------------------------------------------------------

namespace {

void project_zero_mean(std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

struct KrylovWork {
  const PoissonOperator& op;
  const kernels::KernelTable& k;
  std::vector<double> inv_diag;
  std::size_t len;

  double norm(const std::vector<double>& v) const { return std::sqrt(k.dot(v.data(), v.data(), len)); }

  const std::vector<double>* b = nullptr;
  /// Right preconditioner for GMRES; Jacobi when empty.
  std::function<void(const double*, double*)> precond;

  void apply_precond(const double* in, double* out) const {
    if (precond) precond(in, out);
    else k.mul(inv_diag.data(), in, out, len);
  }

  void residual(const std::vector<double>& rhs, const std::vector<double>& x, std::vector<double>& r) const {
    op.apply(x.data(), r.data());
    k.xpby(rhs.data(), -1.0, r.data(), len);
  }
  void residual_from(const std::vector<double>& x, std::vector<double>& r) const { residual(*b, x, r); }
};

// Returns iterations used; x and r are updated in place.
int run_cg(const KrylovWork& w, std::vector<double>& x,
           std::vector<double>& r, double target, int cap) {
  const auto& k = w.k;
  const std::size_t len = w.len;
  std::vector<double> z(len), p(len), ap(len);
  k.mul(w.inv_diag.data(), r.data(), z.data(), len);
  p = z;
  double rz = k.dot(r.data(), z.data(), len);
  int it = 0;
  while (it < cap && w.norm(r) > target) {
    ++it;
    w.op.apply(p.data(), ap.data());
    const double pap = k.dot(p.data(), ap.data(), len);
    if (pap == 0.0 || !std::isfinite(pap)) break;
    const double alpha = rz / pap;
    k.axpy(alpha, p.data(), x.data(), len);
    k.axpy(-alpha, ap.data(), r.data(), len);
    project_zero_mean(x);
    k.mul(w.inv_diag.data(), r.data(), z.data(), len);
    const double rz_new = k.dot(r.data(), z.data(), len);
    k.xpby(z.data(), rz_new / rz, p.data(), len);
    rz = rz_new;
  }
  return it;
}

int run_bicgstab(const KrylovWork& w, std::vector<double>& x,
                 std::vector<double>& r, double target, int cap) {
  const auto& k = w.k;
  const std::size_t len = w.len;
  std::vector<double> rhat = r, p(len, 0.0), v(len, 0.0), phat(len), s(len), shat(len), t(len);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double rhat_norm = w.norm(rhat);
  int it = 0;
  while (it < cap && w.norm(r) > target) {
    ++it;
    double rho_new = k.dot(rhat.data(), r.data(), len);
    if (std::abs(rho_new) <= 1e-30 * rhat_norm * w.norm(r) || omega == 0.0) {
      // Breakdown: restart the shadow space from the current residual.
      rhat = r;
      rhat_norm = w.norm(rhat);
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rho = alpha = omega = 1.0;
      rho_new = k.dot(r.data(), r.data(), len);
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    k.axpy(-omega, v.data(), p.data(), len);
    k.xpby(r.data(), beta, p.data(), len);
    k.mul(w.inv_diag.data(), p.data(), phat.data(), len);
    w.op.apply(phat.data(), v.data());
    const double rv = k.dot(rhat.data(), v.data(), len);
    if (rv == 0.0 || !std::isfinite(rv)) {
      omega = 0.0;
      continue;
    }
    alpha = rho_new / rv;
    s = r;
    k.axpy(-alpha, v.data(), s.data(), len);
    k.axpy(alpha, phat.data(), x.data(), len);
    if (w.norm(s) <= target) {
      r = s;
      project_zero_mean(x);
      break;
    }
    k.mul(w.inv_diag.data(), s.data(), shat.data(), len);
    w.op.apply(shat.data(), t.data());
    const double tt = k.dot(t.data(), t.data(), len);
    omega = tt > 0.0 ? k.dot(t.data(), s.data(), len) / tt : 0.0;
    k.axpy(omega, shat.data(), x.data(), len);
    r = s;
    k.axpy(-omega, t.data(), r.data(), len);
    project_zero_mean(x);
    rho = rho_new;
  }
  return it;
}


// Restarted GMRES with right Jacobi preconditioning, modified Gram-Schmidt and
// Givens rotations.
int run_gmres(const KrylovWork& w, std::vector<double>& x,
              std::vector<double>& r, double target, int cap) {
  const auto& k = w.k;
  const std::size_t len = w.len;
  const int m = kGmresRestart;
  std::vector<std::vector<double>> v(m + 1, std::vector<double>(len));
  std::vector<double> hess((m + 1) * m), cs(m), sn(m), g(m + 1), y(m), z(len);
  auto H = [&](int i, int j) -> double& { return hess[static_cast<std::size_t>(j) * (m + 1) + i]; };
  int it = 0;
  double beta = w.norm(r);
  while (it < cap && beta > target && std::isfinite(beta)) {
    v[0] = r;
    for (double& e : v[0]) e /= beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int j = 0;
    for (; j < m && it < cap; ++j) {
      ++it;
      w.apply_precond(v[j].data(), z.data());
      w.op.apply(z.data(), v[j + 1].data());
      for (int i = 0; i <= j; ++i) {
        H(i, j) = k.dot(v[i].data(), v[j + 1].data(), len);
        k.axpy(-H(i, j), v[i].data(), v[j + 1].data(), len);
      }
      H(j + 1, j) = w.norm(v[j + 1]);
      if (H(j + 1, j) > 0.0)
        for (double& e : v[j + 1]) e /= H(j + 1, j);
      for (int i = 0; i < j; ++i) {
        const double a = H(i, j), b = H(i + 1, j);
        H(i, j) = cs[i] * a + sn[i] * b;
        H(i + 1, j) = -sn[i] * a + cs[i] * b;
      }
      const double rr = std::hypot(H(j, j), H(j + 1, j));
      if (rr == 0.0) break;
      cs[j] = H(j, j) / rr;
      sn[j] = H(j + 1, j) / rr;
      H(j, j) = rr;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if (std::abs(g[j + 1]) <= target) {
        ++j;
        break;
      }
    }
    if (j == 0) break;
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int l = i + 1; l < j; ++l) s -= H(i, l) * y[l];
      y[i] = s / H(i, i);
    }
    std::vector<double>& comb = v[m];  // free once the cycle is done
    std::fill(comb.begin(), comb.end(), 0.0);
    for (int i = 0; i < j; ++i) k.axpy(y[i], v[i].data(), comb.data(), len);
    w.apply_precond(comb.data(), z.data());
    k.axpy(1.0, z.data(), x.data(), len);
    project_zero_mean(x);
    w.residual_from(x, r);
    beta = w.norm(r);
  }
  return it;
}


// Sparse LU of the operator with the last unknown pinned: adding A_kk to the
// (k, k) entry forces x_k = 0 for any consistent right-hand side and leaves a
// nonsingular matrix. The sparsity pattern holds every in-grid neighbor,
// zero or not, so one symbolic analysis serves all operators on a grid.
struct LuFactor {
  using SpMat = Eigen::SparseMatrix<double>;
  int n = 0;
  bool analyzed = false;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;

  void factor(const PoissonOperator& op) {
    const GridSpec& g = op.grid();
    if (g.n() != n) {
      n = g.n();
      analyzed = false;
    }
    const auto len = static_cast<Eigen::Index>(g.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.size() * kernels::kStencilSlots + 1);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int dj = -1; dj <= 1; ++dj)
          for (int di = -1; di <= 1; ++di) {
            const int a = i + di, b = j + dj;
            if (a < 0 || b < 0 || a >= n || b >= n) continue;
            trip.emplace_back(static_cast<Eigen::Index>(g.index(i, j)), static_cast<Eigen::Index>(g.index(a, b)),
                              op.entry(g.index(i, j), g.index(a, b)));
          }
    trip.emplace_back(len - 1, len - 1, op.diagonal()[g.size() - 1]);
    SpMat a(len, len);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();
    if (!analyzed) {
      lu.analyzePattern(a);
      analyzed = true;
    }
    lu.factorize(a);
    if (lu.info() != Eigen::Success)
      throw Error(ErrorKind::NotConverged, "sparse LU factorization failed: " + lu.lastErrorMessage());
  }

  void solve(const double* in, double* out, std::size_t len) const {
    const auto l = static_cast<Eigen::Index>(len);
    Eigen::Map<const Eigen::VectorXd> rhs(in, l);
    Eigen::Map<Eigen::VectorXd> x(out, l);
    x = lu.solve(rhs);
  }
};

}  // namespace

struct PressureCache::Impl {
  LuFactor factor;
  bool valid = false;
  int factorizations = 0;
};

PressureCache::PressureCache() : impl_(std::make_unique<Impl>()) {}
PressureCache::~PressureCache() = default;
int PressureCache::factorizations() const noexcept { return impl_->factorizations; }

namespace {

// GMRES preconditioned by the cached factorization. A stale factorization
// (from an earlier operator) gets kStaleIterations before it is refreshed.
int run_sparse_lu(KrylovWork& w, std::vector<double>& x, std::vector<double>& r, double target, int cap,
                  PressureCache::Impl& cache) {
  auto refresh = [&] {
    cache.factor.factor(w.op);
    cache.valid = true;
    ++cache.factorizations;
  };
  bool fresh = false;
  if (!cache.valid || cache.factor.n != w.op.grid().n()) {
    refresh();
    fresh = true;
  }
  w.precond = [&](const double* in, double* out) { cache.factor.solve(in, out, w.len); };
  int it = run_gmres(w, x, r, target, fresh ? cap : std::min(cap, kStaleIterations));
  if (w.norm(r) > target && !fresh && it < cap) {
    refresh();
    it += run_gmres(w, x, r, target, cap - it);
  }
  w.precond = nullptr;
  return it;
}

}  // namespace

const char* to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::kAuto: return "auto";
    case SolverMethod::kCg: return "cg";
    case SolverMethod::kBiCgStab: return "bicgstab";
    case SolverMethod::kGmres: return "gmres";
    case SolverMethod::kSparseLu: return "sparse-lu";
  }
  return "?";
}

PressureSolution solve_pressure(const PoissonOperator& op, const ScalarField& source,
                                const PressureOptions& options) {
  const GridSpec& g = op.grid();
  require_same_grid(g, source.grid(), "solve_pressure");
  source.require_finite("pressure source");
  if (!(options.tol > 0.0))
    throw Error(ErrorKind::InvalidParameter, "pressure tolerance must be positive");
  const double smean = source.mean();
  if (std::abs(smean) > kSourceMeanTolerance * std::max(1.0, source.max_abs()))
    throw Error(ErrorKind::IncompatibleSource,
                "source mean " + std::to_string(smean) + " violates the zero-mean compatibility condition");

  const std::size_t len = g.size();
  const auto& k = kernels::active();
  SolverMethod method = options.method;
  if (method == SolverMethod::kAuto)
    method = op.is_symmetric() ? SolverMethod::kCg : SolverMethod::kSparseLu;
  PressureSolution out{ScalarField(g), 0, 0.0, method};

  std::vector<double> b(source.values().begin(), source.values().end());
  const double bnorm = std::sqrt(k.dot(b.data(), b.data(), len));
  if (bnorm == 0.0) return out;

  KrylovWork w{op, k, std::vector<double>(len), len, &b, {}};
  PressureCache local;
  PressureCache::Impl& cache = options.cache != nullptr ? options.cache->impl() : local.impl();
  auto diag = op.diagonal();
  for (std::size_t c = 0; c < len; ++c) w.inv_diag[c] = 1.0 / diag[c];

  std::vector<double> x(len, 0.0);
  if (options.initial_guess != nullptr) {
    require_same_grid(g, options.initial_guess->grid(), "solve_pressure guess");
    auto gv = options.initial_guess->values();
    x.assign(gv.begin(), gv.end());
    project_zero_mean(x);
  }
  const int cap = options.max_iterations > 0 ? options.max_iterations : 50 * g.n();
  const double target = options.tol * bnorm;
  std::vector<double> r(len);
  w.residual(b, x, r);

  int used = 0;
  double rel = w.norm(r) / bnorm;
  // The recursive residual can drift from the true one; restart from the
  // true residual until both agree or the cap is exhausted.
  while (rel > options.tol && used < cap && std::isfinite(rel)) {
    int it = 0;
    switch (method) {
      case SolverMethod::kCg: it = run_cg(w, x, r, target, cap - used); break;
      case SolverMethod::kSparseLu: it = run_sparse_lu(w, x, r, target, cap - used, cache); break;
      case SolverMethod::kBiCgStab: it = run_bicgstab(w, x, r, target, cap - used); break;
      default: it = run_gmres(w, x, r, target, cap - used); break;
    }
    used += it;
    project_zero_mean(x);
    w.residual(b, x, r);
    const double prev = rel;
    rel = w.norm(r) / bnorm;
    if (it == 0 || (method == SolverMethod::kSparseLu && rel > 0.5 * prev)) break;
  }
  if (!(rel <= options.tol))
    throw Error(ErrorKind::NotConverged, "pressure solve stalled at relative residual " +
                                             std::to_string(rel) + " after " +
                                             std::to_string(used) + " iterations");
  std::copy(x.begin(), x.end(), out.p.values().begin());
  out.iterations = used;
  out.relative_residual = rel;
  return out;
}

ScalarField solve_pressure(const PoissonOperator& op, const ScalarField& source, double tol) {
  PressureOptions options;
  options.tol = tol;
  return solve_pressure(op, source, options).p;
}

ScalarField make_source(const GridSpec& grid, double sigma, std::array<double, 2> center) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidParameter, "source width sigma must be positive");
  ScalarField e = ScalarField::from_function(grid, [&](double x, double y) {
    const double dx = x - center[0], dy = y - center[1];
    return std::exp(-sigma * (dx * dx + dy * dy));
  });
  const double mean = e.mean();
  for (double& v : e.values()) v -= mean;
  return e;
}

}  // namespace venation
