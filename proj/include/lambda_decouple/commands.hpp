// commands.hpp: subcommand handlers behind the lambda_decouple CLI

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lambda_decouple/config.hpp"
#include "lambda_decouple/dephasing.hpp"
#include "lambda_decouple/oracle.hpp"
#include "lambda_decouple/qutrit.hpp"

namespace lambda_decouple {

namespace exit_status {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int usage = 2;
inline constexpr int numerical = 3;
} // namespace exit_status

struct CommandContext {
    std::optional<std::string> out_path;
    unsigned threads = 1;
    std::ostream& out;
    std::ostream& err;
};

// --threads wins; then LAMBDA_DECOUPLE_THREADS; 0 or unset means hardware concurrency.
unsigned resolve_threads(std::optional<int> flag);

struct GroupReport {
    double sym_sz20 = 0.0;        // max |Pi_G(sz(2,0))|
    double sym_sz21 = 0.0;        // max |Pi_G(sz(2,1))|
    double unitarity_h1 = 0.0;
    double unitarity_h2 = 0.0;
    double product_h1 = 0.0;      // max |h1 - pulse product|
    double product_h2 = 0.0;
    double h0_decomposition = 0.0;
    ClosureReport closure;
    bool pass = true;             // every residual below 1e-10
};

// perturb_h1 tilts h1 by exp(i eps sx(1,0)) to exercise the failure path.
GroupReport verify_group_report(double perturb_h1 = 0.0);

std::string render_figure3_csv(const RunConfig& config, const Figure3Grid& grid);

struct OracleCase {
    std::string name;
    Channel channel = Channel::k1;
    double temperature = 0.0;  // absolute
    int n_cycles = 1;
    double g = 0.0;
    bool pulsed = true;
};

std::vector<OracleCase> oracle_suite(const RunConfig& config);

struct OracleCaseOutcome {
    OracleCase oracle_case;
    OracleResult oracle;
    std::vector<double> analytic;
    ComparisonReport report;
};

OracleCaseOutcome run_oracle_case(const RunConfig& config, const OracleCase& c);

std::string render_oracle_trace_csv(const RunConfig& config, const OracleCaseOutcome& outcome);

int cmd_verify_group(const RunConfig& config, CommandContext& ctx);
int cmd_dephasing_curve(const RunConfig& config, CommandContext& ctx);
int cmd_quiet_regime(const RunConfig& config, CommandContext& ctx);
int cmd_oracle_check(const RunConfig& config, CommandContext& ctx);
int cmd_schedule(const RunConfig& config, CommandContext& ctx);

// Full command-line entry point; returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace lambda_decouple
