#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "venation/adi.hpp"
#include "venation/dynamics.hpp"
#include "venation/grid.hpp"

namespace venation {

enum class SystemKind { kVector, kTensor, kBoth };

const char* to_string(SystemKind kind);

/// A named experiment. Tests that run both models carry a parameter set for
/// each; for the single-parameter rows both sets are equal.
struct TestCase {
  std::string name;
  SystemKind system = SystemKind::kBoth;
  SystemParams params_m;
  SystemParams params_c;
  std::string ic_m;
  std::string ic_c;
  int n = 600;
  double t_fin = 15.0;
  /// Separate parameter sets for the two models (printed as pairs).
  bool matched = false;
  std::string note;
};

const std::vector<TestCase>& test_catalog();

/// Throws Error(NotFound) for unknown names.
const TestCase& lookup_test(const std::string& name);

/// Parameters of the Gaussian source used by every catalog test.
inline constexpr double kSourceSigma = 1000.0;
inline constexpr std::array<double, 2> kSourceCenter = {0.1, 0.1};

std::shared_ptr<const ScalarField> default_source(const GridSpec& grid);

using InitialField = std::variant<VectorField2, SymTensorField2>;

/// Recipes: default_m, default_c, prepared_m, prepared_c, ridge_c, m01, m02,
/// m03, sampled at cell centers. Throws Error(NotFound) for unknown recipes.
InitialField initial_condition(const std::string& recipe, const GridSpec& grid);

VectorField2 initial_m(const std::string& recipe, const GridSpec& grid);
SymTensorField2 initial_c(const std::string& recipe, const GridSpec& grid);

/// The ridge profile (2 - |x + y|) exp(-10 |x - y|).
double ridge_profile(double x, double y);

/// Tensor-model parameters matched to a vector model with constant |m0|:
/// equal diffusivity, alpha doubled, gamma + 1, c scaled by sqrt(2) |m0|.
SystemParams matched_params(const SystemParams& m_params, double m0_norm);

/// || |C| - |m (x) m| || / || |m (x) m| || in the grid L2 norm.
double discrepancy_norm(const SymTensorField2& c, const VectorField2& m);

/// ||a - b|| / ||b||, Frobenius over both components and all cells.
double diff_metric(const VectorField2& a, const VectorField2& b);

struct AccuracyRow {
  int n = 0;
  std::optional<double> error;
  std::optional<double> order;
};

/// Overrides for the runs inside an accuracy study.
struct StudyOptions {
  /// dt = dt_factor * h; joint refinement by default.
  double dt_factor = 1.0;
  std::optional<double> t_fin;
};

/// Magnitude field (|m| or |C|_F) of `test` at resolution n after t_fin.
ScalarField run_magnitude(const TestCase& test, int n, const StudyOptions& options = {});

/// Runs `test` at every n in `n_list` (each twice the previous). The row for n
/// compares the n/2 solution with the restricted n solution.
std::vector<AccuracyRow> richardson_study(const TestCase& test, const std::vector<int>& n_list,
                                          const StudyOptions& options = {});

/// Checkpoint times 0.01 * 2^k, k = 0..6.
std::vector<double> discrepancy_checkpoints();

struct TimeSeries {
  std::vector<double> time;
  std::vector<double> value;
};

/// Linear interpolation of a sampled series at t (clamped to its range).
double interpolate(const TimeSeries& s, double t);

/// Runs both models of a matched test side by side with a shared clock and
/// records the discrepancy norm after every step (including t = 0).
TimeSeries discrepancy_series(const TestCase& test, int n, double t_fin, std::optional<double> dt = {});

/// Two vector-model runs from different initial conditions; diff_metric(a, b)
/// after every step.
TimeSeries diff_series(const TestCase& test, const std::string& ic_a, const std::string& ic_b, int n,
                       double t_fin, std::optional<double> dt = {});

/// Per-model parameters of `test` resolved for a grid: dt defaults to h.
SystemParams resolve_params(const SystemParams& base, const GridSpec& grid, double t_fin,
                            std::optional<double> dt = {});

}  // namespace venation
