#include "venation/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "venation/error.hpp"

namespace venation {

namespace fs = std::filesystem;

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  return out;
}

void check_written(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void write_field_csv(const fs::path& path, const ScalarField& f, double t) {
  auto out = open_out(path);
  const int n = f.n();
  out << "# n=" << n << " h=" << format_real(f.grid().h()) << " t=" << format_real(t) << '\n';
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i) out << ',';
      out << format_real(f(i, j));
    }
    out << '\n';
  }
  check_written(out, path);
}

void write_heatmap(const fs::path& path, const ScalarField& f) {
  f.require_finite("heatmap field");
  auto v = f.values();
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it, hi = *hi_it;
  const int n = f.n();
  std::vector<unsigned char> pixels(f.grid().size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      unsigned char px = 128;
      if (hi > lo) px = static_cast<unsigned char>(std::lround(255.0 * (f(i, j) - lo) / (hi - lo)));
      pixels[static_cast<std::size_t>(n - 1 - j) * n + i] = px;
    }
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << "P5\n# min=" << format_real(lo) << " max=" << format_real(hi) << '\n'
      << n << ' ' << n << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  check_written(out, path);
}

void write_columns_csv(const fs::path& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size())
    throw Error(ErrorKind::InvalidParameter, "header and column counts differ");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw Error(ErrorKind::InvalidParameter, "columns have unequal length");
  auto out = open_out(path);
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (k) out << ',';
      if (std::isnan(columns[k][r])) continue;  // empty cell
      out << format_real(columns[k][r]);
    }
    out << '\n';
  }
  check_written(out, path);
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Config, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw Error(ErrorKind::Config, path.string() + ":" + std::to_string(lineno) + ": empty key");
    std::replace(key.begin(), key.end(), '-', '_');
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

void write_config_file(const fs::path& path, const std::map<std::string, std::string>& kv) {
  auto out = open_out(path);
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
  check_written(out, path);
}

}  // namespace venation
