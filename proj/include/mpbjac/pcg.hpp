#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpbjac/csr_matrix.hpp"
#include "mpbjac/mixed_precision.hpp"
#include "mpbjac/sparse_ops.hpp"

namespace mpbjac {

struct SolveConfig {
  double res_tol = 1e-10;
  std::size_t max_iter = 20000;
  /// Evaluate ||b - A x_k|| every this many iterations; 0 means only at the end.
  std::size_t true_residual_stride = 0;
  Reduction reduction = Reduction::Strict;
  kernels::Exec exec = kernels::Exec::Parallel;

  /// 10 * rows, capped at 20000.
  static std::size_t default_max_iter(std::size_t rows);
  void validate() const;
};

struct IterationRecord {
  std::size_t iter = 0;
  double implicit_relres = 0.0;
  std::optional<double> true_relres;
  /// Preconditioner precision that produced this iterate (None for iterate 0).
  Branch branch = Branch::None;
  /// Seconds since the start of the iteration loop.
  double wall_time = 0.0;
};

enum class SolveStatus { Converged, MaxIterations, IndefiniteOperator, Breakdown, NonFinite };

std::string to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  std::size_t iterations = 0;
  /// Iterate 0 (relres 1) followed by one record per iteration.
  std::vector<IterationRecord> trace;
  double final_true_relres = 0.0;
  /// Iteration loop time excluding true-residual diagnostics.
  double total_time = 0.0;
  double setup_time = 0.0;
  PrecisionPolicy policy;
  /// Iteration at which a breakdown or non-finite value was detected.
  std::optional<std::size_t> failed_iteration;
  std::size_t high_applications = 0;
  std::size_t low_applications = 0;
  std::vector<double> solution;

  bool converged() const noexcept { return status == SolveStatus::Converged; }
};

/// Preconditioned conjugate gradients in double precision. The only
/// low-precision work happens inside `precond`.
///
/// Throws DimensionMismatch for inconsistent sizes and PrecisionOverflow if
/// the residual cannot be narrowed. Numerical failures are reported through
/// SolveReport::status instead.
SolveReport pcg_solve(const CsrMatrix<double>& a, std::span<const double> b, const MixedPreconditioner& precond,
                      const SolveConfig& cfg, std::span<const double> x0 = {});

/// ||b - A x|| / r0_norm, recomputed with an explicit product.
double true_relres(const CsrMatrix<double>& a, std::span<const double> x, std::span<const double> b,
                   double r0_norm, Reduction mode = Reduction::Strict);

/// First iteration present in both traces where the implicit residual
/// curves differ by more than delta_log10 decades. Zero residuals are
/// clamped to the smallest positive normal double.
std::optional<std::size_t> detect_divergence(std::span<const IterationRecord> a, std::span<const IterationRecord> b,
                                             double delta_log10 = 0.5);

/// T_uniform / T_mixed. Both reports must have converged.
double speedup(const SolveReport& uniform, const SolveReport& mixed);

/// CSV with header iter,implicit_relres,true_relres,precision_branch,wall_time.
/// Doubles use shortest round-trip formatting. With include_timing false the
/// wall_time column is left empty so the file depends only on the arithmetic.
void write_trace_csv(std::ostream& os, std::span<const IterationRecord> trace, bool include_timing = true);
void write_trace_csv(const std::filesystem::path& path, std::span<const IterationRecord> trace,
                     bool include_timing = true);
std::vector<IterationRecord> read_trace_csv(const std::filesystem::path& path);

/// Summary fields of a report (status, counts, timings, policy). Callers add
/// their own config echo.
nlohmann::ordered_json summary_json(const SolveReport& report);

}  // namespace mpbjac
