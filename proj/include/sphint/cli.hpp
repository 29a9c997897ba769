// Command-line front end. Each subcommand has a schema (option name, default,
// value type) from which both the flag parser and the config-file validator
// are built; a RunConfig fully determines a run's output.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphint::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kCheckFailure = 4 };

enum class Command { JEval, Rate, Simulate, Verify, Spinglass, Denoise };
enum class Format { Json, Csv };

std::string command_name(Command c);
std::optional<Command> parse_command(const std::string& name);

enum class ValueType { Real, RealList, Integer, Text };

struct OptionSpec {
  std::string key;
  std::string default_value;
  ValueType type;
  std::string help;
};

struct CommandSchema {
  Command command;
  std::string help;
  std::vector<OptionSpec> options;
};

const std::vector<CommandSchema>& schemas();
const CommandSchema& schema_for(Command c);

struct RunConfig {
  Command command = Command::JEval;
  std::map<std::string, std::string> params;  // only explicitly set keys
  std::uint64_t seed = 0;
  std::string output_path;  // empty: standard output
  Format format = Format::Json;

  bool operator==(const RunConfig&) const = default;
};

// Raised for schema violations; `line` is 0 when the value did not come
// from a config file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Flat INI text: `key = value` lines, `#` or `;` comments. The reserved keys
// command, seed, output and format fill the RunConfig fields; every other
// key is a command parameter.
std::string serialize(const RunConfig& config);
RunConfig parse_config(const std::string& text);

// Checks every parameter against the command's schema; throws ConfigError.
void validate(const RunConfig& config);

// Parameter value with the schema default applied.
std::string param(const RunConfig& config, const std::string& key);
// Comma-separated reals; an entry `a:b:step` expands to a grid.
std::vector<double> parse_real_list(const std::string& text);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// CSV with the requested columns in the requested order, values printed
// with 17 significant digits. Throws std::invalid_argument for an empty
// table or an unknown column.
std::string emit_plot_data(const Table& table, std::span<const std::string> columns);

// 17 significant digits, enough for an exact round-trip of any double.
std::string format_real(double x);

struct RunResult {
  int exit_code = kOk;
  std::string output;  // the artifact text (JSON or CSV)
  std::string error;   // diagnostic for nonzero exit codes
};

// Executes a validated config. Never throws: failures map to exit codes.
RunResult run(const RunConfig& config);

// Full command-line entry point (parses argv, applies --config files and
// the SPHINT_SEED override, writes the artifact).
int main_entry(int argc, char** argv);

}  // namespace sphint::cli
