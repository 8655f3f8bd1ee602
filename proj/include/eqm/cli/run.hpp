#pragma once

#include <filesystem>

#include "eqm/cli/config.hpp"

namespace eqm::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kValidationError = 1,
  kVerificationFailure = 2,
  kIoError = 3,
};

/// CSV artifact path for an --out value (extension replaced by .csv).
std::filesystem::path csv_path(const std::filesystem::path& out);
/// JSON artifact path for an --out value (extension replaced by .json).
std::filesystem::path json_path(const std::filesystem::path& out);

/// Executes a parsed configuration and writes its artifacts:
///   simulate  -> paths CSV + moments JSON
///   transform -> grid CSV (t, q, eta, drift) + residual JSON
///   classify  -> JSON {phi_tilde, A, B, dimension, ...}
///   verify    -> JSON report of every check
/// Returns kVerificationFailure if any verify check fails. Validation and I/O
/// problems surface as exceptions (see exit_status_for).
int run(const RunConfig& cfg);

/// Maps an exception escaping run()/parse_config() to an exit status.
int exit_status_for(const std::exception& e) noexcept;

}  // namespace eqm::cli
