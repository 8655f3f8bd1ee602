#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eqm/bernstein.hpp"

namespace eqm::cli {

/// Shortest-safe round-trip decimal: 17 significant digits.
std::string format_real(double v);

/// Header "path_id,t,value"; one row per (path, recorded step); flagged
/// samples leave the value cell empty.
void write_csv(const PathEnsemble& ens, const std::filesystem::path& path);

struct GridRow {
  double t;
  double q;
  double eta;
  double drift;
};

/// Header "t,q,eta,drift".
void write_csv(const std::vector<GridRow>& rows, const std::filesystem::path& path);

struct EnsembleRow {
  std::size_t path_id;
  double t;
  std::optional<double> value;
};

std::vector<EnsembleRow> read_ensemble_csv(const std::filesystem::path& path);

}  // namespace eqm::cli
