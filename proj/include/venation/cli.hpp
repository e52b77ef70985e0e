#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "venation/experiments.hpp"

namespace venation::cli {

/// Everything a subcommand needs. Built from flat key/value pairs so the
/// config file and the command line share one path.
struct RunConfig {
  std::string test;
  std::optional<SystemKind> system;
  std::optional<int> n;
  std::optional<double> dt;
  std::optional<double> t_fin;
  std::filesystem::path out = "out";
  double snap_every = 0.0;
  std::set<std::string> emit = {"energy", "fields"};
  BoundaryMode bc = BoundaryMode::kDirichletZero;
  GradientMode grad = GradientMode::kMirror;
  double tol = 1e-10;
  bool force = false;
  /// Model parameter overrides keyed alpha, c, D, epsilon, gamma, r.
  std::map<std::string, double> overrides;
  std::optional<std::string> ic_m;
  std::optional<std::string> ic_c;

  // accuracy
  std::vector<int> n_list;
  double dt_factor = 1.0;

  // compare
  std::string mode = "discrepancy";
  std::string ic_a = "m01";
  std::string ic_b = "m02";
  std::vector<double> extra_times;
};

/// Throws Error(Config) on unknown keys or unparsable values.
RunConfig parse_config(const std::map<std::string, std::string>& kv);

/// Catalog entry with the config's overrides, resolution and time span applied.
struct ResolvedRun {
  TestCase test;
  SystemKind system;
  int n;
  double dt;
  double t_fin;
};

ResolvedRun resolve(const RunConfig& cfg);

/// Key/value echo of a resolved run, written next to the outputs.
std::map<std::string, std::string> describe(const RunConfig& cfg, const ResolvedRun& run);

/// One line per catalog entry followed by the single-parameter variants.
void cmd_list(std::ostream& out);
int cmd_run(const RunConfig& cfg, std::ostream& log);
int cmd_accuracy(const RunConfig& cfg, std::ostream& log);
int cmd_compare(const RunConfig& cfg, std::ostream& log);

/// Parses argv, dispatches, and maps failures to exit codes 2/3/4.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace venation::cli
