#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "mpbjac/csr_matrix.hpp"
#include "mpbjac/pcg.hpp"

namespace mpbjac::cli {

enum ExitCode : int { kOk = 0, kNotConverged = 1, kUsage = 2, kIo = 3 };

struct LoadedProblem {
  CsrMatrix<double> matrix;
  std::vector<double> rhs;
};

/// Generates or reads the system described by the problem section, then
/// applies the diagonal augmentation.
LoadedProblem resolve_problem(const ProblemConfig& p);

/// Policies to run, with the uniform baseline prepended when needed.
std::vector<PrecisionPolicy> effective_policies(const ExperimentConfig& cfg);

/// Solver settings for a system of `rows` unknowns.
SolveConfig solve_config(const ExperimentConfig& cfg, std::size_t rows);

/// Block count clamped to the number of rows.
BjacParams bjac_params(const ExperimentConfig& cfg, std::size_t rows);

struct PolicyRun {
  PrecisionPolicy policy;
  SolveReport report;
};

std::vector<PolicyRun> run_policies(const ExperimentConfig& cfg, const LoadedProblem& prob);

/// File stem for a policy label, e.g. "adaptive-hl_10".
std::string policy_stem(const PrecisionPolicy& p);

int cmd_gen(const ExperimentConfig& cfg, std::ostream& out);
int cmd_solve(const ExperimentConfig& cfg, std::ostream& out);
int cmd_analyze(const ExperimentConfig& cfg, std::ostream& out);
/// Arguments are trace CSV paths; the summary JSON is the sibling file with
/// the same stem.
int cmd_compare(const std::string& trace_a, const std::string& trace_b, double delta_log10, std::ostream& out);

/// Entry point used by main(); args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpbjac::cli
