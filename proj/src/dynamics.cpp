#include "venation/dynamics.hpp"

#include <cmath>
#include <string>

#include "venation/error.hpp"

namespace venation {

void validate(const SystemParams& p, bool tensor) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidParameter, what); };
  if (!(p.diffusivity >= 0.0)) fail("diffusivity must be >= 0");
  if (!(p.activation >= 0.0)) fail("activation constant must be >= 0");
  if (!(p.metabolic_rate >= 0.0)) fail("metabolic constant must be >= 0");
  if (!(p.metabolic_exp > 0.0)) fail("metabolic exponent must be > 0");
  if (!(p.background > 0.0)) fail("background permeability must be > 0");
  if (!(p.regularization >= 0.0)) fail("regularization must be >= 0");
  if (!(p.dt > 0.0)) fail("time step must be > 0");
  if (!(p.t_fin >= 0.0)) fail("final time must be >= 0");
  if (!(p.poisson_tol > 0.0)) fail("Poisson tolerance must be > 0");
  if (tensor && p.metabolic_exp < 2.0 && !(p.regularization > 0.0))
    fail("tensor model with gamma < 2 needs epsilon > 0");
}

ScalarField metabolic_coeff_m(const VectorField2& m, double gamma) {
  ScalarField out(m.grid());
  const double e = 2.0 * (gamma - 1.0);
  const bool floor = gamma < 1.0;
  auto a = m.c1.values();
  auto b = m.c2.values();
  auto o = out.values();
  for (std::size_t k = 0; k < o.size(); ++k) {
    double mag = std::sqrt(a[k] * a[k] + b[k] * b[k]);
    if (floor && mag < kMagnitudeFloor) mag = kMagnitudeFloor;
    o[k] = std::pow(mag, e);
  }
  return out;
}

ScalarField metabolic_coeff_c(const SymTensorField2& c, double gamma, double epsilon) {
  ScalarField out = c.frobenius();
  const double e = gamma - 2.0;
  for (double& v : out.values()) {
    const double base = v + epsilon;
    if (e < 0.0 && base == 0.0)
      throw Error(ErrorKind::SingularCoefficient,
                  "metabolic coefficient singular: |C| + epsilon = 0 with gamma < 2");
    v = std::pow(base, e);
  }
  return out;
}

ActivationFields activation_terms(const ScalarField& p, GradientMode mode) {
  const ScalarField gx = dx(p, mode);
  const ScalarField gy = dy(p, mode);
  ActivationFields a{ScalarField(p.grid()), ScalarField(p.grid()), ScalarField(p.grid())};
  auto x = gx.values();
  auto y = gy.values();
  auto xx = a.px2.values();
  auto yy = a.py2.values();
  auto xy = a.pxy.values();
  for (std::size_t k = 0; k < x.size(); ++k) {
    xx[k] = x[k] * x[k];
    yy[k] = y[k] * y[k];
    xy[k] = x[k] * y[k];
  }
  return a;
}

namespace {

double grad_sq_sum(const ScalarField& f, GradientMode mode) {
  const ScalarField gx = dx(f, mode);
  const ScalarField gy = dy(f, mode);
  double s = 0.0;
  auto x = gx.values();
  auto y = gy.values();
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * x[k] + y[k] * y[k];
  return s;
}

}  // namespace

double energy_vect(const VectorField2& m, const ScalarField& p, const SystemParams& params) {
  require_same_grid(m.grid(), p.grid(), "energy_vect");
  const double h2 = m.grid().h() * m.grid().h();
  const double d2 = params.diffusivity * params.diffusivity;
  const double c2 = params.activation * params.activation;
  const double a_over_g = params.metabolic_rate / params.metabolic_exp;
  const double r = params.background;

  double dirichlet = 0.0;
  if (d2 > 0.0) dirichlet = grad_sq_sum(m.c1, params.grad) + grad_sq_sum(m.c2, params.grad);

  const ScalarField gx = dx(p, params.grad);
  const ScalarField gy = dy(p, params.grad);
  auto px = gx.values();
  auto py = gy.values();
  auto a = m.c1.values();
  auto b = m.c2.values();
  double activation = 0.0, metabolic = 0.0;
  for (std::size_t k = 0; k < px.size(); ++k) {
    const double mp = a[k] * px[k] + b[k] * py[k];
    activation += r * (px[k] * px[k] + py[k] * py[k]) + mp * mp;
    metabolic += std::pow(a[k] * a[k] + b[k] * b[k], params.metabolic_exp);
  }
  return h2 * (d2 * dirichlet + c2 * activation + a_over_g * metabolic);
}

double energy_tens(const SymTensorField2& c, const ScalarField& p, const SystemParams& params) {
  require_same_grid(c.grid(), p.grid(), "energy_tens");
  const double h2 = c.grid().h() * c.grid().h();
  const double d2 = params.diffusivity * params.diffusivity;
  const double c2 = params.activation * params.activation;
  const double a_over_g = params.metabolic_rate / params.metabolic_exp;
  const double r = params.background;

  double dirichlet = 0.0;
  if (d2 > 0.0)
    dirichlet = grad_sq_sum(c.c11, params.grad) + 2.0 * grad_sq_sum(c.c12, params.grad) +
                grad_sq_sum(c.c22, params.grad);

  const ScalarField gx = dx(p, params.grad);
  const ScalarField gy = dy(p, params.grad);
  const ScalarField fro = c.frobenius();
  auto px = gx.values();
  auto py = gy.values();
  auto c11 = c.c11.values();
  auto c12 = c.c12.values();
  auto c22 = c.c22.values();
  auto f = fro.values();
  double activation = 0.0, metabolic = 0.0;
  for (std::size_t k = 0; k < px.size(); ++k) {
    activation += r * (px[k] * px[k] + py[k] * py[k]) + c11[k] * px[k] * px[k] +
                  2.0 * c12[k] * px[k] * py[k] + c22[k] * py[k] * py[k];
    metabolic += std::pow(f[k], params.metabolic_exp);
  }
  return h2 * (0.5 * d2 * dirichlet + c2 * activation + a_over_g * metabolic);
}

FluxField flux(const SymTensorField2& c, const ScalarField& p, GradientMode mode) {
  require_same_grid(c.grid(), p.grid(), "flux");
  const ScalarField gx = dx(p, mode);
  const ScalarField gy = dy(p, mode);
  FluxField out{VectorField2(c.grid()), ScalarField(c.grid())};
  auto px = gx.values();
  auto py = gy.values();
  auto c11 = c.c11.values();
  auto c12 = c.c12.values();
  auto c22 = c.c22.values();
  auto f1 = out.components.c1.values();
  auto f2 = out.components.c2.values();
  auto mag = out.magnitude.values();
  for (std::size_t k = 0; k < px.size(); ++k) {
    f1[k] = c11[k] * px[k] + c12[k] * py[k];
    f2[k] = c12[k] * px[k] + c22[k] * py[k];
    mag[k] = std::sqrt(f1[k] * f1[k] + f2[k] * f2[k]);
  }
  return out;
}

}  // namespace venation
