#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace kdl::app {

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitRefuted = 2,  // refuted hypotheses, failed preconditions, bad configs and usage errors
    kExitInconclusive = 3,
    kExitBudget = 4,
};

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    std::optional<std::string> out;
    std::optional<double> tol;           // certification tolerance
    std::optional<std::string> input;    // certificate consumed by certify, oracle and landscape
    std::optional<int> points_per_dim;   // oracle and landscape grid override
};

/// Installs a stderr logger whose level comes from KDL_LOG (trace, debug,
/// info, warn, error, critical, off; default warn). Safe to call twice.
void configure_logging();

/// Runs one subcommand (validate, gap, solve, certify, oracle, landscape),
/// writing its artifacts under the output directory and a short report to
/// `out`. Errors are reported on `err` and mapped to exit codes.
int run_command(std::string_view name, const Options& options, std::ostream& out, std::ostream& err);

}  // namespace kdl::app
