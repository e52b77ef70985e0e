#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "venation/grid.hpp"

namespace venation {

/// Shortest decimal string that parses back to the same double.
std::string format_real(double v);

/// `# n=<n> h=<h> t=<t>` followed by one line per j with n comma-separated values.
void write_field_csv(const std::filesystem::path& path, const ScalarField& f, double t);

/// Binary 8-bit PGM with y pointing up. Linear min-max scaling; a constant
/// field maps to 128. The comment line records the extrema.
void write_heatmap(const std::filesystem::path& path, const ScalarField& f);

/// Header row then one row per index. All columns must have equal length.
void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns);

/// Flat `key = value` file; `#` starts a comment. Throws Error(Config) on
/// malformed lines and Error(Io) when unreadable.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

void write_config_file(const std::filesystem::path& path, const std::map<std::string, std::string>& kv);

}  // namespace venation
