#include "eqm/cli/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <map>

namespace eqm::cli {

namespace {

constexpr std::array<std::string_view, 24> kKeys{
    "command", "process", "theta",  "lambda_force", "omega", "beta_rate", "alpha", "beta",
    "phi",     "lambda_mr", "r0",   "z0",           "t0",    "t_end",     "steps", "paths",
    "seed",    "bins",    "solution", "q0",         "q1",    "nq",        "out",   "workers"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  std::string origin;  // "line N" or "flag --key"
};

[[noreturn]] void fail(const std::string& origin, const std::string& key, const std::string& what) {
  throw ConfigError(origin + ": key '" + key + "': " + what);
}

double parse_real(const std::string& key, const Entry& e) {
  double v = 0.0;
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) fail(e.origin, key, "cannot parse number '" + e.value + "'");
  if (!std::isfinite(v)) fail(e.origin, key, "value must be finite");
  return v;
}

std::uint64_t parse_count(const std::string& key, const Entry& e) {
  std::uint64_t v = 0;
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) fail(e.origin, key, "cannot parse nonnegative integer '" + e.value + "'");
  return v;
}

SolutionSelector parse_solution(const Entry& e) {
  const std::string& s = e.value;
  if (s == "constant") return {};
  const auto colon = s.find(':');
  if (colon != std::string::npos) {
    const std::string kind = s.substr(0, colon);
    const Entry param{s.substr(colon + 1), e.origin};
    if (kind == "exponential") return {SolutionSelector::Kind::Exponential, parse_real("solution", param)};
    if (kind == "kernel") return {SolutionSelector::Kind::Kernel, parse_real("solution", param)};
  }
  fail(e.origin, "solution", "expected constant, exponential:<a> or kernel:<T>, got '" + s + "'");
}

Command parse_command(const Entry& e) {
  if (e.value == "simulate") return Command::Simulate;
  if (e.value == "transform") return Command::Transform;
  if (e.value == "classify") return Command::Classify;
  if (e.value == "verify") return Command::Verify;
  fail(e.origin, "command", "unknown command '" + e.value + "'");
}

bool is_known(std::string_view key) {
  for (auto k : kKeys) {
    if (k == key) return true;
  }
  return false;
}

void require(const std::map<std::string, Entry>& entries, std::string_view key, Command c) {
  if (!entries.contains(std::string(key))) {
    throw ConfigError("missing required key '" + std::string(key) + "' for command '" +
                      std::string(command_name(c)) + "'");
  }
}

}  // namespace

std::span<const std::string_view> known_keys() { return kKeys; }

std::string_view command_name(Command c) {
  switch (c) {
    case Command::Simulate:
      return "simulate";
    case Command::Transform:
      return "transform";
    case Command::Classify:
      return "classify";
    case Command::Verify:
      return "verify";
  }
  return "unknown";
}

RunConfig parse_config(std::string_view text, std::span<const Override> overrides) {
  std::map<std::string, Entry> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = (nl == std::string_view::npos) ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string origin = "line " + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(origin + ": expected key=value, got '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!is_known(key)) fail(origin, key, "unknown key");
    if (entries.contains(key)) fail(origin, key, "duplicate key (first set on " + entries[key].origin + ")");
    entries[key] = {value, origin};
  }
  for (const auto& [key, value] : overrides) {
    const std::string origin = "flag --" + key;
    if (!is_known(key)) fail(origin, key, "unknown key");
    entries[key] = {value, origin};
  }

  RunConfig cfg;
  if (!entries.contains("command")) throw ConfigError("missing required key 'command'");
  cfg.command = parse_command(entries["command"]);

  for (const auto& [key, e] : entries) {
    if (key == "command") continue;
    if (key == "process") {
      if (e.value == "bernstein") cfg.process = Process::Bernstein;
      else if (e.value == "rate") cfg.process = Process::Rate;
      else fail(e.origin, key, "expected bernstein or rate, got '" + e.value + "'");
    } else if (key == "solution") {
      cfg.solution = parse_solution(e);
    } else if (key == "out") {
      cfg.out = e.value;
    } else if (key == "steps" || key == "paths" || key == "bins" || key == "nq" || key == "seed" || key == "workers") {
      const std::uint64_t v = parse_count(key, e);
      if (key == "seed") cfg.seed = v;
      else if (key == "workers") cfg.workers = static_cast<unsigned>(v);
      else {
        if (v < 1) fail(e.origin, key, "must be at least 1");
        if (key == "steps") cfg.steps = v;
        else if (key == "paths") cfg.paths = v;
        else if (key == "bins") cfg.bins = v;
        else cfg.nq = v;
      }
    } else {
      const double v = parse_real(key, e);
      std::map<std::string_view, std::optional<double>*> optional_reals{
          {"theta", &cfg.theta},   {"lambda_force", &cfg.lambda_force}, {"omega", &cfg.omega},
          {"beta_rate", &cfg.beta_rate}, {"alpha", &cfg.alpha},       {"beta", &cfg.beta},
          {"phi", &cfg.phi},       {"lambda_mr", &cfg.lambda_mr},       {"r0", &cfg.r0},
          {"z0", &cfg.z0}};
      if (auto it = optional_reals.find(key); it != optional_reals.end()) *it->second = v;
      else if (key == "t0") cfg.t0 = v;
      else if (key == "t_end") cfg.t_end = v;
      else if (key == "q0") cfg.q0 = v;
      else if (key == "q1") cfg.q1 = v;
    }
  }

  const int transform_params = entries.contains("lambda_force") + entries.contains("omega") + entries.contains("beta_rate");
  switch (cfg.command) {
    case Command::Simulate:
      if (cfg.process == Process::Rate) {
        for (auto k : {"alpha", "beta", "phi", "lambda_mr", "r0"}) require(entries, k, cfg.command);
      } else {
        for (auto k : {"theta", "z0"}) require(entries, k, cfg.command);
        if (transform_params > 1) throw ConfigError("at most one of lambda_force, omega, beta_rate may be set");
      }
      break;
    case Command::Transform:
      require(entries, "theta", cfg.command);
      if (transform_params != 1) {
        throw ConfigError("command 'transform' needs exactly one of lambda_force, omega, beta_rate");
      }
      break;
    case Command::Classify:
      for (auto k : {"alpha", "beta", "phi", "lambda_mr"}) require(entries, k, cfg.command);
      break;
    case Command::Verify:
      break;
  }
  if (!(cfg.t_end > cfg.t0)) throw ConfigError("key 't_end': must exceed t0");
  return cfg;
}

}  // namespace eqm::cli
