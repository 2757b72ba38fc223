#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mginf/errors.hpp"

namespace mginf::cli {

enum class Command { transient, busy, bounds, simulate, compare };
enum class OutputFormat { csv, json };

enum ExitCode : int {
    kOk = 0,
    kValidation = 2,
    kCertificate = 3,
    kIo = 4,
};

class UsageError : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

struct RunConfig {
    Command command = Command::transient;
    double lambda = 0.0;
    std::string dist_spec;
    std::optional<double> h;
    std::optional<double> t_max;
    double tol = 1e-4;
    // Expanded, ascending, duplicate-free; empty means the command default.
    std::vector<double> times;
    std::size_t reps = 10000;
    std::size_t cycles = 10000;
    std::uint64_t seed = 1;
    double epsilon = 0.1;
    OutputFormat format = OutputFormat::csv;
    std::string output_path;  // empty: stdout (sidecar to stderr)
    int threads = 0;
    bool serial = false;
};

/// Parses arguments (without the program name). Throws UsageError naming the
/// offending flag; checks module preconditions before returning.
RunConfig parse_args(const std::vector<std::string>& args);

std::string usage();

/// Runs a validated configuration and returns an ExitCode.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with exception-to-exit-code mapping.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mginf::cli
