#include "venation/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "venation/dynamics.hpp"
#include "venation/error.hpp"
#include "venation/io.hpp"

namespace venation::cli {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

double parse_real(const std::string& key, const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    config_error(key + ": expected a real number, got '" + s + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& s) {
  int v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) config_error(key + ": expected an integer, got '" + s + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  config_error(key + ": expected a boolean, got '" + s + "'");
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

const std::set<std::string> kParamKeys = {"alpha", "c", "D", "epsilon", "gamma", "r"};
const std::set<std::string> kEmitKeys = {"fields", "heatmaps", "energy", "flux"};

void apply_param(SystemParams& p, const std::string& key, double v) {
  if (key == "alpha") p.metabolic_rate = v;
  else if (key == "c") p.activation = v;
  else if (key == "D") p.diffusivity = v;
  else if (key == "epsilon") p.regularization = v;
  else if (key == "gamma") p.metabolic_exp = v;
  else if (key == "r") p.background = v;
}

std::string params_text(const SystemParams& p, bool tensor) {
  std::ostringstream s;
  s << "α=" << format_real(p.metabolic_rate) << " c=" << format_real(p.activation)
    << " D=" << format_real(p.diffusivity)
    << " ε=" << (tensor ? format_real(p.regularization) : std::string("-"))
    << " γ=" << format_real(p.metabolic_exp) << " r=" << format_real(p.background);
  return s.str();
}

std::string pair_text(const char* label, double m, double c) {
  if (m == c) return std::string(label) + "=" + format_real(m);
  return std::string(label) + "=" + format_real(m) + "," + format_real(c);
}

}  // namespace

RunConfig parse_config(const std::map<std::string, std::string>& kv) {
  RunConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "test") {
      cfg.test = value;
    } else if (key == "system") {
      if (value == "m") cfg.system = SystemKind::kVector;
      else if (value == "c") cfg.system = SystemKind::kTensor;
      else if (value == "both") cfg.system = SystemKind::kBoth;
      else config_error("system: expected m, c or both, got '" + value + "'");
    } else if (key == "n") {
      cfg.n = parse_int(key, value);
    } else if (key == "dt") {
      cfg.dt = parse_real(key, value);
      if (!(*cfg.dt > 0.0)) config_error("dt must be positive");
    } else if (key == "t_fin") {
      cfg.t_fin = parse_real(key, value);
      if (*cfg.t_fin < 0.0) config_error("t_fin must be >= 0");
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "snap_every") {
      cfg.snap_every = parse_real(key, value);
    } else if (key == "emit") {
      cfg.emit.clear();
      for (const auto& e : split(value)) {
        if (!kEmitKeys.count(e)) config_error("emit: unknown output '" + e + "'");
        cfg.emit.insert(e);
      }
    } else if (key == "bc") {
      if (value == "zero") cfg.bc = BoundaryMode::kDirichletZero;
      else if (value == "steady") cfg.bc = BoundaryMode::kSteadyStateFlux;
      else config_error("bc: expected zero or steady, got '" + value + "'");
    } else if (key == "grad") {
      if (value == "mirror") cfg.grad = GradientMode::kMirror;
      else if (value == "one-sided" || value == "one_sided") cfg.grad = GradientMode::kOneSided;
      else config_error("grad: expected mirror or one-sided, got '" + value + "'");
    } else if (key == "tol") {
      cfg.tol = parse_real(key, value);
      if (!(cfg.tol > 0.0)) config_error("tol must be positive");
    } else if (key == "force") {
      cfg.force = parse_bool(key, value);
    } else if (kParamKeys.count(key)) {
      cfg.overrides[key] = parse_real(key, value);
    } else if (key == "ic_m") {
      cfg.ic_m = value;
    } else if (key == "ic_c") {
      cfg.ic_c = value;
    } else if (key == "n_list") {
      for (const auto& s : split(value)) cfg.n_list.push_back(parse_int(key, s));
    } else if (key == "dt_factor") {
      cfg.dt_factor = parse_real(key, value);
      if (!(cfg.dt_factor > 0.0)) config_error("dt_factor must be positive");
    } else if (key == "mode") {
      if (value != "discrepancy" && value != "diff")
        config_error("mode: expected discrepancy or diff, got '" + value + "'");
      cfg.mode = value;
    } else if (key == "ic_a") {
      cfg.ic_a = value;
    } else if (key == "ic_b") {
      cfg.ic_b = value;
    } else if (key == "times") {
      for (const auto& s : split(value)) cfg.extra_times.push_back(parse_real(key, s));
    } else {
      config_error("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

ResolvedRun resolve(const RunConfig& cfg) {
  TestCase test;
  try {
    test = lookup_test(cfg.test);
  } catch (const Error& e) {
    config_error(e.what());
  }
  for (const auto& [key, v] : cfg.overrides) {
    apply_param(test.params_m, key, v);
    apply_param(test.params_c, key, v);
  }
  // A matched pair stays matched: the tensor set follows the vector set.
  if (test.matched && !cfg.overrides.empty()) {
    const double eps = test.params_c.regularization;
    test.params_c = matched_params(test.params_m, 1.0);
    test.params_c.regularization = eps;
  }
  for (SystemParams* p : {&test.params_m, &test.params_c}) {
    p->bc = cfg.bc;
    p->grad = cfg.grad;
    p->poisson_tol = cfg.tol;
  }
  if (cfg.ic_m) test.ic_m = *cfg.ic_m;
  if (cfg.ic_c) test.ic_c = *cfg.ic_c;

  ResolvedRun run{test, cfg.system.value_or(test.system), cfg.n.value_or(test.n), 0.0,
                  cfg.t_fin.value_or(test.t_fin)};
  if (run.n < 2) config_error("n must be >= 2");
  run.dt = cfg.dt.value_or(1.0 / run.n);
  return run;
}

std::map<std::string, std::string> describe(const RunConfig& cfg, const ResolvedRun& run) {
  std::map<std::string, std::string> kv;
  kv["test"] = run.test.name;
  kv["system"] = to_string(run.system);
  kv["n"] = std::to_string(run.n);
  kv["dt"] = format_real(run.dt);
  kv["t_fin"] = format_real(run.t_fin);
  kv["snap_every"] = format_real(cfg.snap_every);
  std::string emit;
  for (const auto& e : cfg.emit) emit += (emit.empty() ? "" : ",") + e;
  kv["emit"] = emit;
  kv["bc"] = cfg.bc == BoundaryMode::kDirichletZero ? "zero" : "steady";
  kv["grad"] = cfg.grad == GradientMode::kMirror ? "mirror" : "one-sided";
  kv["tol"] = format_real(cfg.tol);
  kv["ic_m"] = run.test.ic_m;
  kv["ic_c"] = run.test.ic_c;
  auto put = [&](const std::string& prefix, const SystemParams& p) {
    kv[prefix + "alpha"] = format_real(p.metabolic_rate);
    kv[prefix + "c"] = format_real(p.activation);
    kv[prefix + "D"] = format_real(p.diffusivity);
    kv[prefix + "epsilon"] = format_real(p.regularization);
    kv[prefix + "gamma"] = format_real(p.metabolic_exp);
    kv[prefix + "r"] = format_real(p.background);
  };
  put("m.", run.test.params_m);
  put("c.", run.test.params_c);
  return kv;
}

void cmd_list(std::ostream& out) {
  const auto& catalog = test_catalog();
  for (const auto& t : catalog) {
    const auto& m = t.params_m;
    const auto& c = t.params_c;
    if (t.matched) {
      out << t.name << ' ' << pair_text("α", m.metabolic_rate, c.metabolic_rate) << ' '
          << pair_text("c", m.activation, c.activation) << ' ' << pair_text("D", m.diffusivity, c.diffusivity)
          << " ε=" << format_real(c.regularization) << ' '
          << pair_text("γ", m.metabolic_exp, c.metabolic_exp) << ' '
          << pair_text("r", m.background, c.background);
    } else {
      const bool tensor = t.system != SystemKind::kVector;
      out << t.name << ' ' << params_text(t.system == SystemKind::kTensor ? c : m, tensor);
    }
    out << " t_fin=" << format_real(t.t_fin) << " n=" << t.n << " system=" << to_string(t.system);
    if (t.matched) out << " (pairs are m,C)";
    out << "  # " << t.note << '\n';
  }

  // Single-parameter variants of the reference run.
  const TestCase& ref = lookup_test("TestD");
  out << "\nvariants of " << ref.name << ":\n";
  for (const auto& t : catalog) {
    if (t.name == ref.name || t.matched || t.n != ref.n) continue;
    const auto& a = ref.params_m;
    const auto& b = t.params_m;
    std::vector<std::string> diffs;
    if (a.metabolic_rate != b.metabolic_rate) diffs.push_back("α=" + format_real(b.metabolic_rate));
    if (a.activation != b.activation) diffs.push_back("c=" + format_real(b.activation));
    if (a.diffusivity != b.diffusivity) diffs.push_back("D=" + format_real(b.diffusivity));
    if (a.regularization != b.regularization) diffs.push_back("ε=" + format_real(b.regularization));
    if (a.metabolic_exp != b.metabolic_exp) diffs.push_back("γ=" + format_real(b.metabolic_exp));
    if (a.background != b.background) diffs.push_back("r=" + format_real(b.background));
    if (diffs.size() != 1) continue;
    out << "  " << t.name << ' ' << diffs.front() << '\n';
  }
}

namespace {

void prepare_out_dir(const fs::path& dir, bool force) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::Io, dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir, ec) && !force)
      throw Error(ErrorKind::Io, "output directory " + dir.string() + " is not empty (use --force)");
  }
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

struct Emitter {
  fs::path dir;
  const std::set<std::string>& emit;

  bool wants(const char* what) const { return emit.count(what) > 0; }

  void field(const std::string& name, const ScalarField& f, double t) const {
    const std::string stamp = "_t" + format_real(t);
    if (wants("fields")) write_field_csv(dir / ("field_" + name + stamp + ".csv"), f, t);
    if (wants("heatmaps")) write_heatmap(dir / ("heatmap_" + name + stamp + ".pgm"), f);
  }

  void flux_mag(const SymTensorField2& c, const ScalarField& p, GradientMode mode, double t) const {
    if (!wants("flux")) return;
    write_field_csv(dir / ("flux_mag_t" + format_real(t) + ".csv"), flux(c, p, mode).magnitude, t);
  }
};

}  // namespace

int cmd_run(const RunConfig& cfg, std::ostream& log) {
  const ResolvedRun run = resolve(cfg);
  prepare_out_dir(cfg.out, cfg.force);
  write_config_file(cfg.out / "config.txt", describe(cfg, run));

  const GridSpec grid(run.n);
  const auto source = default_source(grid);
  const Emitter emitter{cfg.out, cfg.emit};
  const bool do_m = run.system != SystemKind::kTensor;
  const bool do_c = run.system != SystemKind::kVector;

  std::vector<double> time;
  std::vector<std::vector<double>> energy;
  std::vector<std::string> header = {"time"};

  if (do_m) {
    const SystemParams p = resolve_params(run.test.params_m, grid, run.t_fin, run.dt);
    if (p.diffusivity == 0.0) log << "m-system: D = 0, degenerate diffusion mode (pointwise updates)\n";
    RunOptions<MState> opts;
    opts.observers.push_back({cfg.snap_every, [&](const MState& s) {
                                emitter.field("m1", s.m.c1, s.t);
                                emitter.field("m2", s.m.c2, s.t);
                                emitter.field("mmag", s.m.magnitude(), s.t);
                                emitter.field("pm", s.p, s.t);
                                if (!do_c) emitter.flux_mag(outer(s.m), s.p, p.grad, s.t);
                              }});
    auto rec = run_simulation(make_m_state(initial_m(run.test.ic_m, grid), source, p), opts);
    log << "m-system: " << rec.steps << " steps, t=" << format_real(rec.final_state.t)
        << ", energy " << format_real(rec.energy.front()) << " -> " << format_real(rec.energy.back()) << '\n';
    time = rec.time;
    energy.push_back(rec.energy);
    header.push_back(do_c ? "energy_m" : "energy");
  }
  if (do_c) {
    const SystemParams p = resolve_params(run.test.params_c, grid, run.t_fin, run.dt);
    if (p.diffusivity == 0.0) log << "C-system: D = 0, degenerate diffusion mode (pointwise updates)\n";
    RunOptions<CState> opts;
    opts.observers.push_back({cfg.snap_every, [&](const CState& s) {
                                emitter.field("c11", s.c.c11, s.t);
                                emitter.field("c12", s.c.c12, s.t);
                                emitter.field("c22", s.c.c22, s.t);
                                emitter.field("cmag", s.c.frobenius(), s.t);
                                emitter.field("pc", s.p, s.t);
                                emitter.flux_mag(s.c, s.p, p.grad, s.t);
                              }});
    auto rec = run_simulation(make_c_state(initial_c(run.test.ic_c, grid), source, p), opts);
    log << "C-system: " << rec.steps << " steps, t=" << format_real(rec.final_state.t)
        << ", energy " << format_real(rec.energy.front()) << " -> " << format_real(rec.energy.back()) << '\n';
    time = rec.time;
    energy.push_back(rec.energy);
    header.push_back(do_m ? "energy_c" : "energy");
  }

  if (emitter.wants("energy")) {
    std::vector<std::vector<double>> cols = {time};
    cols.insert(cols.end(), energy.begin(), energy.end());
    write_columns_csv(cfg.out / "energy.csv", header, cols);
  }
  return exit_code::kSuccess;
}

int cmd_accuracy(const RunConfig& cfg, std::ostream& log) {
  const ResolvedRun run = resolve(cfg);
  if (cfg.dt) config_error("accuracy runs use dt = dt_factor * h; set dt_factor instead of dt");
  std::vector<int> n_list = cfg.n_list;
  if (n_list.empty()) {
    if (run.n % 8 != 0) config_error("n must be divisible by 8 when n_list is not given");
    n_list = {run.n / 8, run.n / 4, run.n / 2, run.n};
  }
  TestCase test = run.test;
  if (run.system != SystemKind::kBoth) test.system = run.system;
  prepare_out_dir(cfg.out, cfg.force);
  write_config_file(cfg.out / "config.txt", describe(cfg, run));

  StudyOptions opts;
  opts.dt_factor = cfg.dt_factor;
  opts.t_fin = run.t_fin;
  const auto rows = richardson_study(test, n_list, opts);

  const double blank = std::nan("");
  std::vector<double> ns, errs, orders;
  for (const auto& r : rows) {
    ns.push_back(r.n);
    errs.push_back(r.error.value_or(blank));
    orders.push_back(r.order.value_or(blank));
    log << "n=" << r.n << " error=" << (r.error ? format_real(*r.error) : "-")
        << " order=" << (r.order ? format_real(*r.order) : "-") << '\n';
  }
  write_columns_csv(cfg.out / "accuracy.csv", {"n", "error", "order"}, {ns, errs, orders});
  return exit_code::kSuccess;
}

int cmd_compare(const RunConfig& cfg, std::ostream& log) {
  RunConfig c = cfg;
  if (c.test.empty()) c.test = c.mode == "diff" ? "TestD-g175" : "TestM";
  const ResolvedRun run = resolve(c);
  prepare_out_dir(c.out, c.force);
  write_config_file(c.out / "config.txt", describe(c, run));

  if (c.mode == "diff") {
    const TimeSeries s = diff_series(run.test, c.ic_a, c.ic_b, run.n, run.t_fin, run.dt);
    write_columns_csv(c.out / "diff.csv", {"time", "diff"}, {s.time, s.value});
    log << "diff(" << c.ic_a << ", " << c.ic_b << ") at t=" << format_real(s.time.back()) << ": "
        << format_real(s.value.back()) << '\n';
    return exit_code::kSuccess;
  }

  std::vector<double> times;
  for (double t : discrepancy_checkpoints())
    if (t <= run.t_fin * (1.0 + 1e-12)) times.push_back(t);
  for (double t : c.extra_times) {
    if (t < 0.0 || t > run.t_fin) config_error("requested time " + format_real(t) + " is outside [0, t_fin]");
    times.push_back(t);
  }
  times.push_back(0.0);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const TimeSeries s = discrepancy_series(run.test, run.n, run.t_fin, run.dt);
  std::vector<double> values;
  for (double t : times) {
    values.push_back(interpolate(s, t));
    log << "t=" << format_real(t) << " |B|=" << format_real(values.back()) << '\n';
  }
  write_columns_csv(c.out / "discrepancy.csv", {"time", "discrepancy"}, {times, values});
  return exit_code::kSuccess;
}

namespace {

/// Options shared by the simulation subcommands; values land in `kv` under
/// their config-file key only when given on the command line.
struct FlagSink {
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::vector<std::string> sets;
  std::string config_file;
  bool force = false;
  CLI::Option* force_opt = nullptr;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options.emplace_back(key, app->add_option(flag, values[key], help));
  }

  void add_common(CLI::App* app) {
    add(app, "--test", "test", "catalog test name");
    add(app, "--system", "system", "m, c or both");
    add(app, "--n", "n", "cells per side");
    add(app, "--dt", "dt", "time step (default h)");
    add(app, "--t-fin", "t_fin", "final time");
    add(app, "--out", "out", "output directory");
    add(app, "--snap-every", "snap_every", "snapshot cadence in simulated time");
    add(app, "--emit", "emit", "comma list of fields,heatmaps,energy,flux");
    add(app, "--bc", "bc", "zero or steady");
    add(app, "--grad", "grad", "mirror or one-sided");
    add(app, "--tol", "tol", "Poisson relative residual tolerance");
    add(app, "--ic-m", "ic_m", "initial condition recipe for m");
    add(app, "--ic-c", "ic_c", "initial condition recipe for C");
    force_opt = app->add_flag("--force", force, "reuse a non-empty output directory");
    app->add_option("--config", config_file, "key = value config file");
    app->add_option("--set", sets, "parameter override key=value (alpha, c, D, epsilon, gamma, r)");
  }

  std::map<std::string, std::string> merged() const {
    std::map<std::string, std::string> kv;
    if (!config_file.empty()) kv = read_config_file(config_file);
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) kv[key] = values.at(key);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) config_error("--set expects key=value, got '" + s + "'");
      kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (force_opt->count() > 0) kv["force"] = force ? "true" : "false";
    return kv;
  }
};

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transport-network formation: vector and tensor conductivity models"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "print the test catalog");
  auto* run = app.add_subcommand("run", "simulate one or both systems");
  auto* accuracy = app.add_subcommand("accuracy", "Richardson accuracy study");
  auto* compare = app.add_subcommand("compare", "vector/tensor discrepancy or initial-data diff");

  FlagSink run_flags, acc_flags, cmp_flags;
  run_flags.add_common(run);
  acc_flags.add_common(accuracy);
  acc_flags.add(accuracy, "--n-list", "n_list", "comma list of resolutions, each doubling");
  acc_flags.add(accuracy, "--dt-factor", "dt_factor", "dt = factor * h");
  cmp_flags.add_common(compare);
  cmp_flags.add(compare, "--mode", "mode", "discrepancy or diff");
  cmp_flags.add(compare, "--ic-a", "ic_a", "first initial condition (diff mode)");
  cmp_flags.add(compare, "--ic-b", "ic_b", "second initial condition (diff mode)");
  cmp_flags.add(compare, "--times", "times", "extra output times (discrepancy mode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return exit_code::kSuccess;
    }
    err << "error: " << e.what() << '\n';
    return exit_code::kConfig;
  }

  try {
    if (list->parsed()) {
      cmd_list(out);
      return exit_code::kSuccess;
    }
    if (run->parsed()) {
      RunConfig cfg = parse_config(run_flags.merged());
      if (cfg.test.empty()) cfg.test = "TestD";
      return cmd_run(cfg, err);
    }
    if (accuracy->parsed()) {
      RunConfig cfg = parse_config(acc_flags.merged());
      if (cfg.test.empty()) cfg.test = "TestA";
      return cmd_accuracy(cfg, err);
    }
    if (compare->parsed()) return cmd_compare(parse_config(cmp_flags.merged()), err);
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error [io]: " << e.what() << '\n';
    return exit_code::kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kNumerical;
  }
  return exit_code::kConfig;
}

}  // namespace venation::cli
