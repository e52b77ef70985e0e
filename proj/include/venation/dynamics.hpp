#pragma once

#include "venation/grid.hpp"

namespace venation {

enum class BoundaryMode {
  kDirichletZero,    ///< conductivity vanishes on the wall (odd ghost cells)
  kSteadyStateFlux,  ///< boundary cells follow the zero-diffusivity steady state
};

/// Parameters of one model (vector or tensor conductivity).
struct SystemParams {
  double diffusivity = 0.0;     ///< D; the diffusion coefficient is D^2
  double activation = 1.0;      ///< c; the activation weight is c^2
  double metabolic_rate = 1.0;  ///< alpha
  double metabolic_exp = 1.0;   ///< gamma
  double background = 0.1;      ///< r, isotropic background permeability
  double regularization = 0.0;  ///< epsilon, tensor model only
  double dt = 0.01;
  double t_fin = 1.0;
  BoundaryMode bc = BoundaryMode::kDirichletZero;
  GradientMode grad = GradientMode::kMirror;
  double poisson_tol = 1e-10;
};

/// Throws Error(InvalidParameter) for out-of-range values. `tensor` adds the
/// requirement epsilon > 0 when gamma < 2.
void validate(const SystemParams& params, bool tensor);

/// Products of the discrete pressure gradient.
struct ActivationFields {
  ScalarField px2;  ///< (Dx p)^2
  ScalarField py2;  ///< (Dy p)^2
  ScalarField pxy;  ///< (Dx p)(Dy p)
};

/// Floor applied to |m| in the vector metabolic coefficient when gamma < 1.
inline constexpr double kMagnitudeFloor = 1e-14;

/// |m|^{2(gamma-1)}, with |m| floored at kMagnitudeFloor when gamma < 1.
ScalarField metabolic_coeff_m(const VectorField2& m, double gamma);

/// (|C|_F + epsilon)^{gamma-2}. Throws Error(SingularCoefficient) when the base
/// vanishes with gamma < 2.
ScalarField metabolic_coeff_c(const SymTensorField2& c, double gamma, double epsilon);

ActivationFields activation_terms(const ScalarField& p, GradientMode mode);

/// Discrete vector-model energy, midpoint quadrature of
/// D^2 |grad m|^2 + c^2 grad p . (rI + m m^T) grad p + (alpha/gamma) |m|^{2 gamma}.
double energy_vect(const VectorField2& m, const ScalarField& p, const SystemParams& params);

/// Discrete tensor-model energy, midpoint quadrature of
/// (D^2/2) |grad C|^2 + c^2 grad p . (rI + C) grad p + (alpha/gamma) |C|_F^gamma.
double energy_tens(const SymTensorField2& c, const ScalarField& p, const SystemParams& params);

struct FluxField {
  VectorField2 components;
  ScalarField magnitude;
};

/// C grad p with central differences; pass outer(m) for the vector model.
FluxField flux(const SymTensorField2& c, const ScalarField& p,
               GradientMode mode = GradientMode::kMirror);

}  // namespace venation
