#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hess2/iteration.hpp"
#include "hess2/run_config.hpp"
#include "hess2/verify.hpp"

namespace hess2 {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitEpsilon = 3,
    kExitSolve = 4,
    kExitVerify = 5,
};

// Exit code as a function of the outcome and the verification flags.
int exit_code_for(Outcome outcome, bool verification_pass);

// Tau record as JSON: values, sigma, cone, sigma_reduced, sigma2_target.
nlohmann::ordered_json tau_json(const Tau& tau);

// Prints tau_json(select_tau(f0, mode)) on `out`.
int cmd_tau(double f0, TauMode mode, std::ostream& out, std::ostream& err);

// Everything a solve produced, for callers that want more than the files.
struct SolveResult {
    int exit_code = kExitConfig;
    std::optional<Tau> tau;
    std::optional<IterationState> state;
    std::optional<VerificationReport> report;
    double g_final_sup = 0.0;
};

// Runs tau selection, eps selection, the iteration and verification, writing
// convergence.csv, report.json and config.txt (plus w.csv and u-samples.csv
// with emit_fields) into cfg.output_dir.
int cmd_solve(const RunConfig& cfg, std::ostream& err, SolveResult* result = nullptr);

// CSV eps,g0_sup,margin: one eps probe per entry.
int cmd_sweep(const RunConfig& cfg, const std::vector<double>& eps_list, std::ostream& out,
              std::ostream& err);

// Re-verifies a solve directory from report.json and w.csv.
int cmd_verify(const std::string& dir, std::ostream& out, std::ostream& err);

nlohmann::ordered_json report_json(const VerificationReport& rep);

}  // namespace hess2
