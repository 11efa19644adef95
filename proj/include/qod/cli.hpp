// File formats and the command pipeline behind the `qod` tool.
//
// Instance file, one key per line:
//   variant 1|2|3
//   c <ints>
//   target <int>               (variant 1)
//   bounds <lo> <hi>           (variant 2)
//   w <ints>, budget <int>     (variant 3)
// `#` starts a comment; blank lines are ignored.
//
// Device file: `key=value` per line, SI units; keys lambda, d_b, L, n_gates,
// R_M, kappa, delta_p, T_atom, gain, I_sat, phase_jitter.

#ifndef QOD_CLI_HPP_
#define QOD_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qod/knapsack.hpp"
#include "qod/optics.hpp"

namespace qod {

inline constexpr std::string_view kToolVersion = "0.1.0";

class ParseError : public std::invalid_argument {
 public:
  ParseError(int line, const std::string& message)
      : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + message
                                       : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

KnapsackInstance parse_instance(std::string_view source);
std::string emit_instance(const KnapsackInstance& inst);

// Sizing context for device files that leave geometry keys out: missing keys
// are filled from size_device(n, max_sum, lambda, total_length / n).
struct DeviceContext {
  int n = 1;
  std::int64_t max_sum = 0;
  double lambda = 5e-7;
  double total_length = 10.0;  // n * L
};

DeviceContext device_context_for(const KnapsackInstance& inst);

DeviceParameters parse_device(std::string_view source,
                              const std::optional<DeviceContext>& context = std::nullopt);
std::string emit_device(const DeviceParameters& dev);

// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double v);

enum class Command { Solve, Simulate, Feasibility, Cost, Compare };
enum class Method { Dp, Exhaustive, Truncated, Qod };
enum class OutputFormat { Text, Structured };

std::optional<Command> parse_command(std::string_view s);
std::optional<Method> parse_method(std::string_view s);
std::string_view to_string(Command c);
std::string_view to_string(Method m);

struct RunConfig {
  Command command = Command::Solve;
  std::optional<Method> method;
  std::vector<std::string> instance_paths;
  std::optional<std::string> device_path;
  std::optional<double> epsilon;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::Text;
  bool strict = false;
  std::optional<std::string> dump_stages;
  std::int64_t inputs = 1;  // M, for cost and compare
};

// Throws std::invalid_argument for inconsistent combinations (qod outside
// simulate/compare, epsilon without truncated/cost/compare, ...).
void validate(const RunConfig& config);

// Ordered key/value record.
class Report {
 public:
  void add(std::string key, std::string value);
  void add(std::string key, double value) { add(std::move(key), format_number(value)); }
  void add(std::string key, std::int64_t value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, bool value) { add(std::move(key), std::string(value ? "true" : "false")); }
  void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }

  const std::vector<std::pair<std::string, std::string>>& fields() const { return fields_; }
  std::optional<std::string> find(std::string_view key) const;

  std::string render(OutputFormat format) const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitWarnings = 1;  // only with --strict
inline constexpr int kExitError = 2;

// Executes the configured command. Reports go to `out`; a failure produces
// exactly one diagnostic line on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace qod

#endif  // QOD_CLI_HPP_
