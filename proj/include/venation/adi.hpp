#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "venation/dynamics.hpp"
#include "venation/grid.hpp"
#include "venation/poisson.hpp"

namespace venation {

/// Vector-model state at one time level; p solves the Poisson problem for m.
struct MState {
  double t = 0.0;
  VectorField2 m;
  ScalarField p;
  SystemParams params;
  std::shared_ptr<const ScalarField> source;
  int poisson_iterations = 0;
  /// Pressure factorization reused along the trajectory.
  std::shared_ptr<PressureCache> pressure_cache;
};

/// Tensor-model state at one time level.
struct CState {
  double t = 0.0;
  SymTensorField2 c;
  ScalarField p;
  SystemParams params;
  std::shared_ptr<const ScalarField> source;
  int poisson_iterations = 0;
  /// Pressure factorization reused along the trajectory.
  std::shared_ptr<PressureCache> pressure_cache;
};

/// Builds the initial state and solves its pressure. Under kDirichletZero the
/// boundary cells of m0 / c0 are zeroed.
MState make_m_state(VectorField2 m0, std::shared_ptr<const ScalarField> source,
                    const SystemParams& params);
CState make_c_state(SymTensorField2 c0, std::shared_ptr<const ScalarField> source,
                    const SystemParams& params);

/// One symmetric-ADI step: the y-first and x-first two-sweep branches are run
/// from the same state and averaged, then the pressure is recomputed.
/// Pressure, activation and metabolic coefficients are frozen at level n.
///
/// Throws Error(PivotFailure) when a line system loses its positive pivots
/// (dt too large for the implicit activation), and propagates Poisson errors.
MState adi_step_m(const MState& state);
CState adi_step_c(const CState& state);

/// The two ADI branches before averaging, exposed for symmetry checks.
struct MBranches {
  VectorField2 y_first;
  VectorField2 x_first;
};
MBranches adi_branches_m(const MState& state);

struct CBranches {
  SymTensorField2 y_first;
  SymTensorField2 x_first;
};
CBranches adi_branches_c(const CState& state);

/// Steady-state boundary trace beta grad p on boundary cells (zero inside),
/// beta = (c^2/alpha |grad p|^{4-2 gamma})^{1/(2(gamma-1))}, one-sided gradients.
/// Throws Error(UnsupportedExponent) for gamma == 1.
VectorField2 boundary_values_m(const ScalarField& p, const SystemParams& params);

/// Tensor analogue: beta~ grad p (x) grad p with
/// beta~ = (c^2/alpha |grad p|^{-2(gamma-2)})^{1/(gamma-1)}.
SymTensorField2 boundary_values_c(const ScalarField& p, const SystemParams& params);

/// Callback invoked on the initial state and then whenever the simulated time
/// crosses a multiple of `every` (and at the final step). every <= 0 means
/// initial and final state only.
template <class State>
struct Observer {
  double every = 0.0;
  std::function<void(const State&)> callback;
};

template <class State>
struct RunOptions {
  std::vector<Observer<State>> observers;
  /// Stop once |dE| / (|E| dt) falls below this; <= 0 disables.
  double steady_tol = 0.0;
};

template <class State>
struct RunRecord {
  std::vector<double> time;
  std::vector<double> energy;
  std::vector<int> poisson_iterations;
  State final_state;
  int steps = 0;
  bool reached_steady = false;
};

double energy_of(const MState& s);
double energy_of(const CState& s);

/// Number of steps needed to reach t_fin with the given dt; the last step is
/// shortened so the run ends exactly at t_fin.
int step_count(double t_fin, double dt);

/// Advances to params.t_fin, recording the energy after every step.
/// Step errors are rethrown with the failing time in the message.
RunRecord<MState> run_simulation(const MState& initial, const RunOptions<MState>& options = {});
RunRecord<CState> run_simulation(const CState& initial, const RunOptions<CState>& options = {});

}  // namespace venation
