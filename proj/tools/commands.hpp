#pragma once

#include <stdexcept>
#include <string>

#include <CLI11.hpp>

namespace orchard::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kInvalidInput = 3, kBackend = 4, kInternal = 5 };

/// Bad flag combination or empty input that CLI11 itself cannot catch.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Each register_* adds one subcommand whose callback runs the command and
/// stores its exit code in `status`.
void register_route(CLI::App& app, int& status);
void register_exec(CLI::App& app, int& status);
void register_batch(CLI::App& app, int& status);
void register_ratio(CLI::App& app, int& status);
void register_simulate(CLI::App& app, int& status);
void register_calibrate(CLI::App& app, int& status);
void register_report(CLI::App& app, int& status);
void register_gen_corpus(CLI::App& app, int& status);

}  // namespace orchard::cli
