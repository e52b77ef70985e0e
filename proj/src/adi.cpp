#include "venation/adi.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "venation/error.hpp"
#include "venation/kernels.hpp"
#include "venation/poisson.hpp"

namespace venation {

namespace {

enum class Axis { kX, kY };

void copy_boundary(const ScalarField& from, ScalarField& to) {
  const int n = from.n();
  for (int k = 0; k < n; ++k) {
    to(k, 0) = from(k, 0);
    to(k, n - 1) = from(k, n - 1);
    to(0, k) = from(0, k);
    to(n - 1, k) = from(n - 1, k);
  }
}

// f + lam * (second difference of f along `axis`). With `wall` every cell is
// updated and the ghost beyond the wall is -f, so f vanishes on the wall;
// otherwise boundary cells are left unchanged.
ScalarField explicit_half_step(const ScalarField& f, Axis axis, double lam, bool wall) {
  ScalarField out = f;
  if (lam == 0.0) return out;
  const int n = f.n();
  const int lo = wall ? 0 : 1;
  const int hi = wall ? n : n - 1;
  for (int j = lo; j < hi; ++j)
    for (int i = lo; i < hi; ++i) {
      const int a = axis == Axis::kX ? i : j;
      const double fc = f(i, j);
      const double fm = a == 0 ? -fc : (axis == Axis::kX ? f(i - 1, j) : f(i, j - 1));
      const double fp = a == n - 1 ? -fc : (axis == Axis::kX ? f(i + 1, j) : f(i, j + 1));
      out(i, j) = fc + lam * (fm - 2.0 * fc + fp);
    }
  return out;
}

// Solves (I - lam * second difference along `axis` + diag(extra)) x = rhs.
// With `wall` the line ends use the odd ghost; otherwise boundary cells are
// identity rows carrying rhs unchanged.
ScalarField implicit_solve(const ScalarField& rhs, const ScalarField* extra, Axis axis, double lam, bool wall) {
  const GridSpec& g = rhs.grid();
  const int n = g.n();
  const std::size_t len = g.size();

  // Lines along y are interleaved in natural storage; lines along x are
  // handled by transposing so the batched kernel always sees one layout.
  const ScalarField rhs_l = axis == Axis::kY ? rhs : rhs.transposed();
  ScalarField extra_l(g);
  if (extra != nullptr) extra_l = axis == Axis::kY ? *extra : extra->transposed();

  std::vector<double> sub(len), diag(len), sup(len);
  // In line layout (position k, line l) the cell is interior iff both are.
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const std::size_t c = static_cast<std::size_t>(k) * n + l;
      const bool end = k == 0 || k == n - 1;
      if (wall) {
        sub[c] = k == 0 ? 0.0 : -lam;
        sup[c] = k == n - 1 ? 0.0 : -lam;
        diag[c] = 1.0 + (end ? 3.0 : 2.0) * lam + extra_l.data()[c];
      } else if (end || l == 0 || l == n - 1) {
        sub[c] = 0.0;
        diag[c] = 1.0;
        sup[c] = 0.0;
      } else {
        sub[c] = -lam;
        sup[c] = -lam;
        diag[c] = 1.0 + 2.0 * lam + extra_l.data()[c];
      }
    }

  ScalarField x_l(g);
  int failed = 0;
  if (lam == 0.0) {
    // Zero diffusivity: the systems are diagonal, update pointwise.
    for (std::size_t c = 0; c < len; ++c) {
      if (!(diag[c] > 0.0 && std::isfinite(diag[c]))) ++failed;
      x_l.data()[c] = rhs_l.data()[c] / diag[c];
    }
  } else {
    std::vector<double> sc(len), sd(len);
    kernels::TridiagBatch batch{sub.data(), diag.data(), sup.data(), rhs_l.data(), x_l.data(),
                                sc.data(),  sd.data(),   n,          n};
    failed = kernels::active().tridiag_solve(batch);
  }
  if (failed > 0)
    throw Error(ErrorKind::PivotFailure,
                std::to_string(failed) +
                    " line system(s) lost positive pivots; reduce the time step");
  return axis == Axis::kY ? x_l : x_l.transposed();
}

void add_scaled_product(ScalarField& out, double scale, const ScalarField& a, const ScalarField& b) {
  auto o = out.values();
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] += scale * (av[k] * bv[k]);
}

void add_scaled(ScalarField& out, double scale, const ScalarField& a) {
  auto o = out.values();
  auto av = a.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] += scale * av[k];
}

// dt * (alpha Q - c^2 P) for the implicit diagonal of a second sweep.
ScalarField reaction_diagonal(double dt, double alpha, const ScalarField& q, double c2,
                              const ScalarField* act) {
  ScalarField out(q.grid());
  auto o = out.values();
  auto qv = q.values();
  for (std::size_t k = 0; k < o.size(); ++k) {
    const double a = act != nullptr ? act->values()[k] : 0.0;
    o[k] = dt * (alpha * qv[k]) - dt * (c2 * a);
  }
  return out;
}

Axis other(Axis a) { return a == Axis::kX ? Axis::kY : Axis::kX; }

double half_lambda(const SystemParams& p, const GridSpec& g) {
  return p.dt * p.diffusivity * p.diffusivity / (2.0 * g.h() * g.h());
}

// Two sweeps of one branch for one component: implicit along `first`, then
// along the other axis with the reaction diagonal.
// `bc` is null for wall Dirichlet, else the boundary-cell values.
ScalarField branch(const ScalarField& u, const ScalarField& forcing, const ScalarField& react,
                   const ScalarField* bc, Axis first, double lam) {
  const bool wall = bc == nullptr;
  ScalarField rhs1 = explicit_half_step(u, other(first), lam, wall);
  add_scaled(rhs1, 1.0, forcing);
  if (bc) copy_boundary(*bc, rhs1);
  ScalarField mid = implicit_solve(rhs1, nullptr, first, lam, wall);
  ScalarField rhs2 = explicit_half_step(mid, first, lam, wall);
  if (bc) copy_boundary(*bc, rhs2);
  return implicit_solve(rhs2, &react, other(first), lam, wall);
}

ScalarField average(const ScalarField& a, const ScalarField& b) {
  ScalarField out(a.grid());
  auto o = out.values();
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = 0.5 * (av[k] + bv[k]);
  return out;
}

struct BoundaryGradient {
  ScalarField gx, gy;
};

BoundaryGradient boundary_gradient(const ScalarField& p) {
  return {dx(p, GradientMode::kOneSided), dy(p, GradientMode::kOneSided)};
}

void require_steady_exponent(const SystemParams& params) {
  if (params.metabolic_exp == 1.0)
    throw Error(ErrorKind::UnsupportedExponent,
                "steady-state boundary values are undefined for gamma = 1");
  if (!(params.metabolic_rate > 0.0))
    throw Error(ErrorKind::InvalidParameter, "steady-state boundary values need alpha > 0");
}

ScalarField solve_for(const PermeabilityField& perm, const ScalarField& source,
                      const SystemParams& params, const ScalarField* guess, int* iterations,
                      PressureCache* cache) {
  PressureOptions opt;
  opt.cache = cache;
  opt.tol = params.poisson_tol;
  opt.initial_guess = guess;
  PressureSolution sol = solve_pressure(assemble(perm), source, opt);
  if (iterations != nullptr) *iterations = sol.iterations;
  return std::move(sol.p);
}

}  // namespace

VectorField2 boundary_values_m(const ScalarField& p, const SystemParams& params) {
  require_steady_exponent(params);
  const GridSpec& g = p.grid();
  const int n = g.n();
  const auto grad = boundary_gradient(p);
  const double c2a = params.activation * params.activation / params.metabolic_rate;
  const double gamma = params.metabolic_exp;
  VectorField2 out(g);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (!g.is_boundary(i, j)) continue;
      const double gx = grad.gx(i, j), gy = grad.gy(i, j);
      const double mag = std::sqrt(gx * gx + gy * gy);
      if (mag == 0.0) continue;
      const double beta = std::pow(c2a * std::pow(mag, 4.0 - 2.0 * gamma), 1.0 / (2.0 * (gamma - 1.0)));
      out.c1(i, j) = beta * gx;
      out.c2(i, j) = beta * gy;
    }
  return out;
}

SymTensorField2 boundary_values_c(const ScalarField& p, const SystemParams& params) {
  require_steady_exponent(params);
  const GridSpec& g = p.grid();
  const int n = g.n();
  const auto grad = boundary_gradient(p);
  const double c2a = params.activation * params.activation / params.metabolic_rate;
  const double gamma = params.metabolic_exp;
  SymTensorField2 out(g);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (!g.is_boundary(i, j)) continue;
      const double gx = grad.gx(i, j), gy = grad.gy(i, j);
      const double mag = std::sqrt(gx * gx + gy * gy);
      if (mag == 0.0) continue;
      const double beta = std::pow(c2a * std::pow(mag, -2.0 * (gamma - 2.0)), 1.0 / (gamma - 1.0));
      out.c11(i, j) = beta * gx * gx;
      out.c12(i, j) = beta * gx * gy;
      out.c22(i, j) = beta * gy * gy;
    }
  return out;
}

MState make_m_state(VectorField2 m0, std::shared_ptr<const ScalarField> source,
                    const SystemParams& params) {
  validate(params, false);
  if (!source) throw Error(ErrorKind::InvalidParameter, "missing source field");
  require_same_grid(m0.grid(), source->grid(), "make_m_state");
  m0.c1.require_finite("initial m");
  m0.c2.require_finite("initial m");
  int its = 0;
  auto cache = std::make_shared<PressureCache>();
  ScalarField p = solve_for(permeability_from_m(m0, params.background), *source, params, nullptr, &its, cache.get());
  return MState{0.0, std::move(m0), std::move(p), params, std::move(source), its, std::move(cache)};
}

CState make_c_state(SymTensorField2 c0, std::shared_ptr<const ScalarField> source,
                    const SystemParams& params) {
  validate(params, true);
  if (!source) throw Error(ErrorKind::InvalidParameter, "missing source field");
  require_same_grid(c0.grid(), source->grid(), "make_c_state");
  c0.c11.require_finite("initial C");
  c0.c12.require_finite("initial C");
  c0.c22.require_finite("initial C");
  int its = 0;
  auto cache = std::make_shared<PressureCache>();
  ScalarField p = solve_for(permeability_from_c(c0, params.background), *source, params, nullptr, &its, cache.get());
  return CState{0.0, std::move(c0), std::move(p), params, std::move(source), its, std::move(cache)};
}

MBranches adi_branches_m(const MState& s) {
  const SystemParams& prm = s.params;
  const GridSpec& g = s.m.grid();
  const double lam = half_lambda(prm, g);
  const double c2 = prm.activation * prm.activation;
  const ActivationFields act = activation_terms(s.p, prm.grad);
  const ScalarField q = metabolic_coeff_m(s.m, prm.metabolic_exp);

  const bool steady = prm.bc == BoundaryMode::kSteadyStateFlux;
  VectorField2 bc(g);
  if (steady) bc = boundary_values_m(s.p, prm);

  // Cross activation c^2 (Dx p Dy p) m_other, explicit at level n.
  ScalarField force1(g), force2(g);
  add_scaled_product(force1, prm.dt * c2, act.pxy, s.m.c2);
  add_scaled_product(force2, prm.dt * c2, act.pxy, s.m.c1);
  const ScalarField react1 = reaction_diagonal(prm.dt, prm.metabolic_rate, q, c2, &act.px2);
  const ScalarField react2 = reaction_diagonal(prm.dt, prm.metabolic_rate, q, c2, &act.py2);

  MBranches out{VectorField2(g), VectorField2(g)};
  out.y_first.c1 = branch(s.m.c1, force1, react1, steady ? &bc.c1 : nullptr, Axis::kY, lam);
  out.y_first.c2 = branch(s.m.c2, force2, react2, steady ? &bc.c2 : nullptr, Axis::kY, lam);
  out.x_first.c1 = branch(s.m.c1, force1, react1, steady ? &bc.c1 : nullptr, Axis::kX, lam);
  out.x_first.c2 = branch(s.m.c2, force2, react2, steady ? &bc.c2 : nullptr, Axis::kX, lam);
  return out;
}

CBranches adi_branches_c(const CState& s) {
  const SystemParams& prm = s.params;
  const GridSpec& g = s.c.grid();
  const double lam = half_lambda(prm, g);
  const double c2 = prm.activation * prm.activation;
  const ActivationFields act = activation_terms(s.p, prm.grad);
  const ScalarField q = metabolic_coeff_c(s.c, prm.metabolic_exp, prm.regularization);

  const bool steady = prm.bc == BoundaryMode::kSteadyStateFlux;
  SymTensorField2 bc(g);
  if (steady) bc = boundary_values_c(s.p, prm);

  ScalarField f11(g), f12(g), f22(g);
  add_scaled(f11, prm.dt * c2, act.px2);
  add_scaled(f12, prm.dt * c2, act.pxy);
  add_scaled(f22, prm.dt * c2, act.py2);
  const ScalarField react = reaction_diagonal(prm.dt, prm.metabolic_rate, q, 0.0, nullptr);

  CBranches out{SymTensorField2(g), SymTensorField2(g)};
  out.y_first.c11 = branch(s.c.c11, f11, react, steady ? &bc.c11 : nullptr, Axis::kY, lam);
  out.y_first.c12 = branch(s.c.c12, f12, react, steady ? &bc.c12 : nullptr, Axis::kY, lam);
  out.y_first.c22 = branch(s.c.c22, f22, react, steady ? &bc.c22 : nullptr, Axis::kY, lam);
  out.x_first.c11 = branch(s.c.c11, f11, react, steady ? &bc.c11 : nullptr, Axis::kX, lam);
  out.x_first.c12 = branch(s.c.c12, f12, react, steady ? &bc.c12 : nullptr, Axis::kX, lam);
  out.x_first.c22 = branch(s.c.c22, f22, react, steady ? &bc.c22 : nullptr, Axis::kX, lam);
  return out;
}

MState adi_step_m(const MState& s) {
  MBranches b = adi_branches_m(s);
  VectorField2 m(average(b.x_first.c1, b.y_first.c1), average(b.x_first.c2, b.y_first.c2));
  m.c1.require_finite("m");
  m.c2.require_finite("m");
  int its = 0;
  ScalarField p = solve_for(permeability_from_m(m, s.params.background), *s.source, s.params, &s.p, &its,
                            s.pressure_cache.get());
  return MState{s.t + s.params.dt, std::move(m), std::move(p), s.params, s.source, its, s.pressure_cache};
}

CState adi_step_c(const CState& s) {
  CBranches b = adi_branches_c(s);
  SymTensorField2 c(average(b.x_first.c11, b.y_first.c11), average(b.x_first.c12, b.y_first.c12),
                    average(b.x_first.c22, b.y_first.c22));
  c.c11.require_finite("C");
  c.c12.require_finite("C");
  c.c22.require_finite("C");
  int its = 0;
  ScalarField p = solve_for(permeability_from_c(c, s.params.background), *s.source, s.params, &s.p, &its,
                            s.pressure_cache.get());
  return CState{s.t + s.params.dt, std::move(c), std::move(p), s.params, s.source, its, s.pressure_cache};
}

double energy_of(const MState& s) { return energy_vect(s.m, s.p, s.params); }
double energy_of(const CState& s) { return energy_tens(s.c, s.p, s.params); }

int step_count(double t_fin, double dt) {
  if (t_fin <= 0.0) return 0;
  return static_cast<int>(std::ceil(t_fin / dt - 1e-9));
}

namespace {

MState step(const MState& s) { return adi_step_m(s); }
CState step(const CState& s) { return adi_step_c(s); }

template <class State>
RunRecord<State> run(const State& initial, const RunOptions<State>& options) {
  const double dt = initial.params.dt;
  const double t_fin = initial.params.t_fin;
  const int steps = step_count(t_fin - initial.t, dt);

  RunRecord<State> rec{{}, {}, {}, initial, 0, false};
  rec.time.push_back(initial.t);
  rec.energy.push_back(energy_of(initial));
  rec.poisson_iterations.push_back(initial.poisson_iterations);
  for (const auto& obs : options.observers) obs.callback(initial);

  State cur = initial;
  for (int k = 0; k < steps; ++k) {
    const double t_next = std::min(initial.t + (k + 1) * dt, t_fin);
    const double t_now = cur.t;
    cur.params.dt = t_next - t_now;
    try {
      cur = step(cur);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << e.what() << " (step " << k + 1 << ", t=" << t_now << ")";
      throw Error(e.kind(), msg.str());
    }
    cur.t = t_next;
    cur.params.dt = dt;
    const double e_prev = rec.energy.back();
    const double e_now = energy_of(cur);
    rec.time.push_back(cur.t);
    rec.energy.push_back(e_now);
    rec.poisson_iterations.push_back(cur.poisson_iterations);
    rec.steps = k + 1;

    const bool last = k + 1 == steps;
    bool steady = false;
    if (options.steady_tol > 0.0 && e_prev != 0.0)
      steady = std::abs(e_now - e_prev) / (std::abs(e_prev) * (t_next - t_now)) < options.steady_tol;
    for (const auto& obs : options.observers) {
      bool fire = last || steady;
      if (!fire && obs.every > 0.0) {
        const double eps = 1e-9 * obs.every;
        fire = std::floor((t_next + eps) / obs.every) > std::floor((t_now + eps) / obs.every);
      }
      if (fire) obs.callback(cur);
    }
    if (steady) {
      rec.reached_steady = true;
      break;
    }
  }
  rec.final_state = std::move(cur);
  return rec;
}

}  // namespace

RunRecord<MState> run_simulation(const MState& initial, const RunOptions<MState>& options) {
  return run(initial, options);
}

RunRecord<CState> run_simulation(const CState& initial, const RunOptions<CState>& options) {
  return run(initial, options);
}

}  // namespace venation
