#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpbjac/bjac.hpp"
#include "mpbjac/precision.hpp"

namespace mpbjac {

enum class PolicyKind { Uniform, FixedLow, AdaptiveHL, AdaptiveLH };

/// Which preconditioner produced a given z.
enum class Branch { None, High, Low };

std::string to_string(PolicyKind k);
std::string to_string(Branch b);

/// How preconditioner applications are mapped onto precisions.
///   Uniform     high precision every time
///   FixedLow    narrow r, apply in low precision, widen z
///   AdaptiveHL  high while relres >= adp_tol, low afterwards
///   AdaptiveLH  low while relres >= adp_tol, high afterwards
struct PrecisionPolicy {
  PolicyKind kind = PolicyKind::Uniform;
  double adp_tol = 0.0;
  Precision low = Precision::F32;
  Precision work = Precision::F64;

  static PrecisionPolicy uniform() { return {PolicyKind::Uniform, 0.0}; }
  static PrecisionPolicy fixed_low() { return {PolicyKind::FixedLow, 0.0}; }
  static PrecisionPolicy adaptive_hl(double tol = 10.0) { return {PolicyKind::AdaptiveHL, tol}; }
  static PrecisionPolicy adaptive_lh(double tol = 1e-5) { return {PolicyKind::AdaptiveLH, tol}; }

  bool adaptive() const noexcept { return kind == PolicyKind::AdaptiveHL || kind == PolicyKind::AdaptiveLH; }
  bool needs_high() const noexcept { return kind != PolicyKind::FixedLow; }
  bool needs_low() const noexcept { return kind != PolicyKind::Uniform; }

  /// Throws InvalidArgument unless adp_tol > 0 for adaptive kinds and low is
  /// narrower than work.
  void validate() const;

  /// Short name used in file names and reports, e.g. "uniform", "adaptive-hl:10".
  std::string label() const;

  /// Parses "kind[:adp_tol]". Kinds: uniform, fixed-low (fmp), adaptive-hl (hl),
  /// adaptive-lh (lh). Adaptive kinds default to 10 (hl) and 1e-5 (lh).
  static PrecisionPolicy parse(const std::string& spec);
};

/// The branch a policy takes for the given implicit relative residual.
/// Ties (relres == adp_tol) take the ">=" side.
Branch select_branch(const PrecisionPolicy& policy, double relres) noexcept;

/// Per-call scratch for MixedPreconditioner. Owned by the caller.
struct MixedWorkspace {
  BjacWorkspace<double> high;
  BjacWorkspace<float> low;
  std::vector<float> r_low;
  std::vector<float> z_low;
};

/// A block-Jacobi preconditioner available in working and/or low precision
/// plus the policy deciding which one runs. Both copies are built eagerly.
class MixedPreconditioner {
 public:
  MixedPreconditioner(const CsrMatrix<double>& a, const BjacParams& params, const PrecisionPolicy& policy,
                      kernels::Exec exec = kernels::Exec::Parallel);

  const PrecisionPolicy& policy() const noexcept { return policy_; }
  const BjacParams& params() const noexcept { return params_; }
  std::size_t rows() const noexcept { return rows_; }
  bool has_high() const noexcept { return high_.has_value(); }
  bool has_low() const noexcept { return low_.has_value(); }
  const BjacPreconditioner<double>& high() const { return high_.value(); }
  const BjacPreconditioner<float>& low() const { return low_.value(); }

  /// z = widen(M_low^{-1} narrow(r)). Throws PrecisionOverflow if r does not fit.
  Branch fmp_apply(std::span<const double> r, std::span<double> z, MixedWorkspace& ws) const;

  /// Dispatches to the high or low preconditioner according to the policy.
  Branch amp_apply(std::span<const double> r, double relres, std::span<double> z, MixedWorkspace& ws) const;

  std::vector<double> fmp_apply(std::span<const double> r) const;
  std::vector<double> amp_apply(std::span<const double> r, double relres, Branch* taken = nullptr) const;

 private:
  PrecisionPolicy policy_;
  BjacParams params_;
  std::size_t rows_;
  std::optional<BjacPreconditioner<double>> high_;
  std::optional<BjacPreconditioner<float>> low_;
};

}  // namespace mpbjac
