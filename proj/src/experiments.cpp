#include "venation/experiments.hpp"

#include <cmath>

#include "venation/error.hpp"
#include "venation/poisson.hpp"

namespace venation {

const char* to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::kVector: return "m";
    case SystemKind::kTensor: return "c";
    case SystemKind::kBoth: return "both";
  }
  return "?";
}

namespace {

SystemParams row(double alpha, double c, double d, double eps, double gamma, double r, double t_fin) {
  SystemParams p;
  p.metabolic_rate = alpha;
  p.activation = c;
  p.diffusivity = d;
  p.regularization = eps;
  p.metabolic_exp = gamma;
  p.background = r;
  p.t_fin = t_fin;
  return p;
}

TestCase single(std::string name, SystemKind kind, SystemParams p, int n, std::string note) {
  TestCase t;
  t.name = std::move(name);
  t.system = kind;
  t.params_m = p;
  t.params_c = p;
  t.ic_m = "default_m";
  t.ic_c = "default_c";
  t.n = n;
  t.t_fin = p.t_fin;
  t.note = std::move(note);
  return t;
}

std::vector<TestCase> build_catalog() {
  std::vector<TestCase> c;
  // Accuracy studies.
  c.push_back(single("TestA", SystemKind::kVector, row(0.5, 1, 0.01, 0.0, 0.75, 0.1, 1), 160,
                     "accuracy, vector model"));
  c.push_back(single("TestB", SystemKind::kTensor, row(1, 1, 0.01, 0.1, 1.75, 0.1, 1), 200,
                     "accuracy, tensor model"));
  c.push_back(single("TestC", SystemKind::kVector, row(0.5, 5, 0.01, 0.0, 0.75, 0.01, 1), 160,
                     "accuracy, vector model"));
  // Diffusivity, exponent and regularization sweeps around TestD.
  c.push_back(single("TestD", SystemKind::kBoth, row(0.75, 5, 0.01, 1e-3, 0.75, 0.005, 15), 600,
                     "reference network run"));
  c.push_back(single("TestE", SystemKind::kBoth, row(0.75, 5, 0.001, 1e-3, 0.75, 0.005, 15), 600,
                     "D = 0.001"));
  c.push_back(single("TestF", SystemKind::kBoth, row(0.75, 5, 0.01, 1e-3, 0.5, 0.005, 15), 600,
                     "gamma = 0.5"));
  c.push_back(single("TestG", SystemKind::kBoth, row(0.75, 5, 0.05, 1e-3, 0.75, 0.005, 15), 600,
                     "D = 0.05"));
  c.push_back(single("TestH", SystemKind::kBoth, row(0.75, 5, 0.01, 1e-3, 1, 0.005, 15), 600,
                     "gamma = 1"));
  c.push_back(single("TestI", SystemKind::kBoth, row(0.75, 5, 0.01, 1e-2, 0.75, 0.005, 15), 600,
                     "epsilon = 1e-2"));
  c.push_back(single("TestL", SystemKind::kBoth, row(0.75, 5, 0.01, 1e-4, 0.75, 0.005, 15), 600,
                     "epsilon = 1e-4"));

  // Matched parameter sets with well-prepared data.
  TestCase m;
  m.name = "TestM";
  m.system = SystemKind::kBoth;
  m.params_m = row(0.5, 1, 0.1, 0.1, 0.75, 0.1, 0.64);
  m.params_c = matched_params(m.params_m, 1.0);
  m.ic_m = "prepared_m";
  m.ic_c = "prepared_c";
  m.n = 600;
  m.t_fin = 0.64;
  m.matched = true;
  m.note = "matched parameters, well-prepared data";
  c.push_back(m);

  // Zero and vanishing diffusivity.
  c.push_back(single("TestN", SystemKind::kBoth, row(0.75, 5, 0, 1e-3, 0.75, 0.005, 15), 600,
                     "D = 0"));
  c.push_back(single("TestO", SystemKind::kBoth, row(0.75, 5, 1e-5, 1e-3, 0.75, 0.005, 15), 600,
                     "D = 1e-5"));

  // Steady-state uniqueness: TestD with gamma = 1.75, vector model.
  TestCase u = single("TestD-g175", SystemKind::kVector, row(0.75, 5, 0.01, 1e-3, 1.75, 0.005, 15),
                      600, "derived: TestD with gamma = 1.75");
  u.ic_m = "m01";
  c.push_back(u);
  return c;
}

}  // namespace

const std::vector<TestCase>& test_catalog() {
  static const std::vector<TestCase> catalog = build_catalog();
  return catalog;
}

const TestCase& lookup_test(const std::string& name) {
  for (const auto& t : test_catalog())
    if (t.name == name) return t;
  throw Error(ErrorKind::NotFound, "unknown test '" + name + "'");
}

std::shared_ptr<const ScalarField> default_source(const GridSpec& grid) {
  return std::make_shared<const ScalarField>(make_source(grid, kSourceSigma, kSourceCenter));
}

double ridge_profile(double x, double y) {
  return (2.0 - std::abs(x + y)) * std::exp(-10.0 * std::abs(x - y));
}

namespace {

template <class F>
VectorField2 vector_from(const GridSpec& g, F&& f) {
  VectorField2 v(g);
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      const auto [a, b] = f(g.x(i), g.y(j));
      v.c1(i, j) = a;
      v.c2(i, j) = b;
    }
  return v;
}

std::pair<double, double> constant(double a, double b) { return {a, b}; }

}  // namespace

InitialField initial_condition(const std::string& recipe, const GridSpec& g) {
  return [&]() -> InitialField {
    const double half_sqrt2 = std::sqrt(2.0) / 2.0;
    if (recipe == "default_m") return vector_from(g, [](double, double) { return constant(1.0, 1.0); });
    if (recipe == "prepared_m")
      return vector_from(g, [&](double, double) { return constant(half_sqrt2, half_sqrt2); });
    if (recipe == "m01")
      return vector_from(g, [](double, double) { return constant(1.0, std::sqrt(2.0)); });
    if (recipe == "m02") return vector_from(g, [](double, double) { return constant(5.0, 5.0); });
    if (recipe == "m03")
      return vector_from(g, [](double x, double y) {
        const double f = ridge_profile(x, y);
        return constant(f, f);
      });
    if (recipe == "default_c") {
      SymTensorField2 c(g);
      for (double& v : c.c11.values()) v = 1.0;
      for (double& v : c.c22.values()) v = 1.0;
      return c;
    }
    // Built as the outer product of prepared_m so C0 = m0 (x) m0 holds bitwise.
    if (recipe == "prepared_c")
      return outer(vector_from(g, [&](double, double) { return constant(half_sqrt2, half_sqrt2); }));
    if (recipe == "ridge_c") {
      SymTensorField2 c(g);
      c.c11 = ScalarField::from_function(g, ridge_profile);
      c.c22 = c.c11;
      return c;
    }
    throw Error(ErrorKind::NotFound, "unknown initial condition '" + recipe + "'");
  }();
}

VectorField2 initial_m(const std::string& recipe, const GridSpec& grid) {
  auto f = initial_condition(recipe, grid);
  if (auto* v = std::get_if<VectorField2>(&f)) return std::move(*v);
  throw Error(ErrorKind::Config, "initial condition '" + recipe + "' is not a vector field");
}

SymTensorField2 initial_c(const std::string& recipe, const GridSpec& grid) {
  auto f = initial_condition(recipe, grid);
  if (auto* c = std::get_if<SymTensorField2>(&f)) return std::move(*c);
  throw Error(ErrorKind::Config, "initial condition '" + recipe + "' is not a tensor field");
}

SystemParams matched_params(const SystemParams& m_params, double m0_norm) {
  if (!(m0_norm > 0.0)) throw Error(ErrorKind::InvalidParameter, "|m0| must be positive");
  SystemParams c = m_params;
  c.metabolic_rate = 2.0 * m_params.metabolic_rate;
  c.metabolic_exp = m_params.metabolic_exp + 1.0;
  c.activation = std::sqrt(2.0) * m_params.activation * m0_norm;
  return c;
}

double discrepancy_norm(const SymTensorField2& c, const VectorField2& m) {
  require_same_grid(c.grid(), m.grid(), "discrepancy_norm");
  const ScalarField cn = c.frobenius();
  const ScalarField mn = outer(m).frobenius();
  ScalarField diff(c.grid());
  auto d = diff.values();
  auto a = cn.values();
  auto b = mn.values();
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = a[k] - b[k];
  const double denom = l2_norm(mn);
  if (denom == 0.0) throw Error(ErrorKind::ZeroDenominator, "discrepancy_norm: |m (x) m| vanishes");
  return l2_norm(diff) / denom;
}

double diff_metric(const VectorField2& a, const VectorField2& b) {
  require_same_grid(a.grid(), b.grid(), "diff_metric");
  double num = 0.0, den = 0.0;
  for (ScalarField VectorField2::*comp : {&VectorField2::c1, &VectorField2::c2}) {
    auto av = (a.*comp).values();
    auto bv = (b.*comp).values();
    for (std::size_t k = 0; k < av.size(); ++k) {
      num += (av[k] - bv[k]) * (av[k] - bv[k]);
      den += bv[k] * bv[k];
    }
  }
  if (den == 0.0) throw Error(ErrorKind::ZeroDenominator, "diff_metric: reference field vanishes");
  return std::sqrt(num) / std::sqrt(den);
}

SystemParams resolve_params(const SystemParams& base, const GridSpec& grid, double t_fin,
                            std::optional<double> dt) {
  SystemParams p = base;
  p.dt = dt.value_or(grid.h());
  p.t_fin = t_fin;
  return p;
}

ScalarField run_magnitude(const TestCase& test, int n, const StudyOptions& options) {
  const GridSpec g(n);
  const double t_fin = options.t_fin.value_or(test.t_fin);
  const auto source = default_source(g);
  if (test.system == SystemKind::kTensor) {
    const SystemParams p = resolve_params(test.params_c, g, t_fin, options.dt_factor * g.h());
    auto rec = run_simulation(make_c_state(initial_c(test.ic_c, g), source, p));
    return rec.final_state.c.frobenius();
  }
  const SystemParams p = resolve_params(test.params_m, g, t_fin, options.dt_factor * g.h());
  auto rec = run_simulation(make_m_state(initial_m(test.ic_m, g), source, p));
  return rec.final_state.m.magnitude();
}

std::vector<AccuracyRow> richardson_study(const TestCase& test, const std::vector<int>& n_list,
                                          const StudyOptions& options) {
  for (std::size_t k = 1; k < n_list.size(); ++k)
    if (n_list[k] != 2 * n_list[k - 1])
      throw Error(ErrorKind::Config, "accuracy resolutions must double at every step");
  std::vector<AccuracyRow> rows;
  std::optional<ScalarField> coarse;
  for (int n : n_list) {
    ScalarField mag = run_magnitude(test, n, options);
    AccuracyRow row;
    row.n = n;
    if (coarse) {
      row.error = rel_l2_error(*coarse, restrict_to_coarse(mag));
      const auto& prev = rows.back().error;
      if (prev && *row.error > 0.0) row.order = std::log2(*prev / *row.error);
    }
    rows.push_back(row);
    coarse = std::move(mag);
  }
  return rows;
}

std::vector<double> discrepancy_checkpoints() {
  std::vector<double> t;
  for (int k = 0; k <= 6; ++k) t.push_back(0.01 * std::ldexp(1.0, k));
  return t;
}

double interpolate(const TimeSeries& s, double t) {
  if (s.time.empty()) throw Error(ErrorKind::InvalidParameter, "interpolate: empty series");
  if (t <= s.time.front()) return s.value.front();
  if (t >= s.time.back()) return s.value.back();
  std::size_t k = 1;
  while (s.time[k] < t) ++k;
  const double t0 = s.time[k - 1], t1 = s.time[k];
  const double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * s.value[k - 1] + w * s.value[k];
}

TimeSeries discrepancy_series(const TestCase& test, int n, double t_fin, std::optional<double> dt) {
  const GridSpec g(n);
  const auto source = default_source(g);
  const SystemParams pm = resolve_params(test.params_m, g, t_fin, dt);
  const SystemParams pc = resolve_params(test.params_c, g, t_fin, dt);
  MState ms = make_m_state(initial_m(test.ic_m, g), source, pm);
  CState cs = make_c_state(initial_c(test.ic_c, g), source, pc);
  TimeSeries out;
  out.time.push_back(0.0);
  out.value.push_back(discrepancy_norm(cs.c, ms.m));
  const int steps = step_count(t_fin, pm.dt);
  for (int k = 0; k < steps; ++k) {
    const double t_next = std::min((k + 1) * pm.dt, t_fin);
    ms.params.dt = cs.params.dt = t_next - ms.t;
    ms = adi_step_m(ms);
    cs = adi_step_c(cs);
    ms.t = cs.t = t_next;
    out.time.push_back(t_next);
    out.value.push_back(discrepancy_norm(cs.c, ms.m));
  }
  return out;
}

TimeSeries diff_series(const TestCase& test, const std::string& ic_a, const std::string& ic_b, int n,
                       double t_fin, std::optional<double> dt) {
  const GridSpec g(n);
  const auto source = default_source(g);
  const SystemParams p = resolve_params(test.params_m, g, t_fin, dt);
  MState a = make_m_state(initial_m(ic_a, g), source, p);
  MState b = make_m_state(initial_m(ic_b, g), source, p);
  TimeSeries out;
  out.time.push_back(0.0);
  out.value.push_back(diff_metric(a.m, b.m));
  const int steps = step_count(t_fin, p.dt);
  for (int k = 0; k < steps; ++k) {
    const double t_next = std::min((k + 1) * p.dt, t_fin);
    a.params.dt = b.params.dt = t_next - a.t;
    a = adi_step_m(a);
    b = adi_step_m(b);
    a.t = b.t = t_next;
    out.time.push_back(t_next);
    out.value.push_back(diff_metric(a.m, b.m));
  }
  return out;
}

}  // namespace venation
