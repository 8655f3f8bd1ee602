#include "eqm/cli/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string_view>

#include "eqm/error.hpp"

namespace eqm::cli {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

double parse_cell(std::string_view cell, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": malformed number '" + std::string(cell) + "'");
  }
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

void write_csv(const PathEnsemble& ens, const std::filesystem::path& path) {
  auto os = open_for_write(path);
  os << "path_id,t,value\n";
  const auto steps = ens.recorded_steps();
  std::vector<std::string> times;
  times.reserve(steps.size());
  for (std::size_t k : steps) times.push_back(format_real(ens.grid().time(k)));
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    const auto row = ens.row(p);
    const auto absorbed = ens.absorbed_at(p);
    for (std::size_t c = 0; c < steps.size(); ++c) {
      os << p << ',' << times[c] << ',';
      if (!(absorbed && steps[c] >= *absorbed)) os << format_real(row[c]);
      os << '\n';
    }
  }
  finish(os, path);
}

void write_csv(const std::vector<GridRow>& rows, const std::filesystem::path& path) {
  auto os = open_for_write(path);
  os << "t,q,eta,drift\n";
  for (const auto& r : rows) {
    os << format_real(r.t) << ',' << format_real(r.q) << ',' << format_real(r.eta) << ',' << format_real(r.drift)
       << '\n';
  }
  finish(os, path);
}

std::vector<EnsembleRow> read_ensemble_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(is, line) || line != "path_id,t,value") {
    throw IoError(path.string() + ": missing 'path_id,t,value' header");
  }
  std::vector<EnsembleRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected three fields");
    }
    const std::string_view sv(line);
    EnsembleRow row{};
    const auto id = sv.substr(0, c1);
    const auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), row.path_id);
    if (ec != std::errc{} || ptr != id.data() + id.size()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed path id");
    }
    row.t = parse_cell(sv.substr(c1 + 1, c2 - c1 - 1), path, line_no);
    const auto value = sv.substr(c2 + 1);
    if (!value.empty()) row.value = parse_cell(value, path, line_no);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace eqm::cli
