#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqm/error.hpp"

namespace eqm::cli {

/// Invalid configuration; the message names the offending key and, for file
/// input, its line.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class Command { Simulate, Transform, Classify, Verify };
enum class Process { Bernstein, Rate };

struct SolutionSelector {
  enum class Kind { Constant, Exponential, Kernel };
  Kind kind = Kind::Constant;
  /// a for exponential, horizon T for kernel.
  double parameter = 0.0;
};

struct RunConfig {
  Command command = Command::Verify;
  Process process = Process::Bernstein;

  std::optional<double> theta;
  std::optional<double> lambda_force;
  std::optional<double> omega;
  std::optional<double> beta_rate;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> phi;
  std::optional<double> lambda_mr;
  std::optional<double> r0;
  std::optional<double> z0;

  double t0 = 0.0;
  double t_end = 1.0;
  std::size_t steps = 1000;
  std::size_t paths = 10000;
  std::uint64_t seed = 42;
  std::size_t bins = 20;
  /// Simulation threads, 0 = hardware concurrency. Never changes output bytes.
  unsigned workers = 0;

  // Space grid of the transform command.
  double q0 = -1.0;
  double q1 = 1.0;
  std::size_t nq = 200;

  SolutionSelector solution;
  std::string out;
};

using Override = std::pair<std::string, std::string>;

/// Keys accepted in config files and as --key flags.
std::span<const std::string_view> known_keys();

/// Parses flat `key=value` lines ('#' starts a comment) and applies the
/// overrides on top. Validates required keys for the chosen command.
RunConfig parse_config(std::string_view text, std::span<const Override> overrides = {});

std::string_view command_name(Command c);

}  // namespace eqm::cli
