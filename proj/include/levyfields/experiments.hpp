#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "levyfields/config.hpp"

// The experiment catalog behind the command-line runner.  Each experiment
// binds its parameters from a parsed config (throwing ConfigError with a
// field path on any violation), computes, writes CSV/JSON outputs into a
// run directory, and reports named pass/fail checks with the violated
// tolerance spelled out in the detail string.

namespace levyfields {

struct ExperimentInfo {
    std::string name;
    std::string description;
    std::string params; // one-line summary of the config surface
};

// The eight experiments, in catalog order.
const std::vector<ExperimentInfo>& experiment_catalog();

struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunResult {
    std::vector<CheckOutcome> checks;
    std::vector<std::string> outputs; // file names created in the run directory

    bool passed() const;
};

// Binds every parameter the named experiment will read, without computing.
// Throws ConfigError naming the offending field.
void validate_experiment_config(const Config& cfg);

// Runs the experiment named in the config with the given effective seed
// (after any environment override), writing outputs into out_dir (which
// must already exist).  Throws ConfigError on bad configuration; numeric
// failures inside modules propagate as their own error types.
RunResult run_experiment(const Config& cfg, std::uint64_t seed,
                         const std::filesystem::path& out_dir);

} // namespace levyfields
