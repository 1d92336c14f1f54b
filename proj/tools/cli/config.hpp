#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpbjac/mixed_precision.hpp"
#include "mpbjac/pcg.hpp"
#include "mpbjac/problemgen.hpp"

namespace mpbjac::cli {

/// Bad configuration value or file; maps to exit code 2.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct ProblemConfig {
  std::string family = "const";
  int n = 16;
  double s = 1.0;
  std::uint64_t seed = 0;
  std::string rhs = "ones";
  std::uint64_t rhs_seed = 0;
  double p_diag = 0.0;
  /// Matrix Market file; when set, the generator settings are ignored.
  std::optional<std::filesystem::path> matrix;
  /// Right-hand side for a loaded matrix (array format); ones if absent.
  std::optional<std::filesystem::path> rhs_file;
};

struct PrecondConfig {
  std::size_t nb = 32;
  int k = 2;
  int t = 2;
};

struct SolveSection {
  double res_tol = 1e-10;
  std::optional<std::size_t> max_iter;
  std::optional<std::size_t> trace_stride;
  Reduction reduction = Reduction::Strict;
  bool timing = true;
  bool baseline = true;  // add uniform when mixed policies are requested
  double delta_log10 = 0.5;
};

struct ExperimentConfig {
  ProblemConfig problem;
  PrecondConfig precond;
  std::vector<PrecisionPolicy> policies{PrecisionPolicy::uniform()};
  SolveSection solve;
  std::vector<double> edges = decade_edges_default();
  std::filesystem::path out = "out";

  static std::vector<double> decade_edges_default();
};

/// INI-style file with sections [problem], [preconditioner], [policies],
/// [solve], [analyze], [output]. Unknown keys are rejected.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Comma separated numbers, or the names "decade" / "anisotropy".
std::vector<double> parse_edges(const std::string& spec);

std::string reduction_name(Reduction r);
Reduction parse_reduction(const std::string& s);

/// Everything needed to rerun the experiment.
nlohmann::ordered_json config_echo(const ExperimentConfig& cfg);

/// Identifies the linear system independently of solver settings.
nlohmann::ordered_json problem_descriptor(const ExperimentConfig& cfg, std::size_t rows, std::size_t nnz);

}  // namespace mpbjac::cli
