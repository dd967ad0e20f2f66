#ifndef PTCORR_COMMANDS_HPP
#define PTCORR_COMMANDS_HPP

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ptcorr/runconfig.hpp"

namespace ptcorr {

struct CommandOptions {
    std::string out_dir;      // overrides config output.dir when non-empty
    int threads = 0;          // 0: leave runtime default
    unsigned long long seed = 12345;
    std::string inject_fault; // test fixture, e.g. "b1-sign"
};

// exit codes: 0 ok, 2 config error (thrown as config_error), 3 numerical failure
int cmd_scatter(const RunConfig& cfg, const CommandOptions& opt);
int cmd_correlate(const RunConfig& cfg, const CommandOptions& opt);

struct SuiteResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidateReport {
    std::vector<SuiteResult> suites;
    int failed = 0;
    unsigned long long seed = 0;

    std::string to_json() const;
    std::string human_summary() const;
};

ValidateReport run_validation_suites(const std::optional<RunConfig>& cfg,
                                     const CommandOptions& opt);
int cmd_validate(const std::optional<RunConfig>& cfg, const CommandOptions& opt);

// random piecewise profile for the property suites
BarrierProfile random_profile(std::mt19937_64& rng);

void apply_thread_option(int threads);

} // namespace ptcorr

#endif
