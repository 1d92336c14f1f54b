#include "mpbjac/mixed_precision.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "mpbjac/error.hpp"
#include "mpbjac/sparse_ops.hpp"

namespace mpbjac {

std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Uniform: return "uniform";
    case PolicyKind::FixedLow: return "fixed-low";
    case PolicyKind::AdaptiveHL: return "adaptive-hl";
    case PolicyKind::AdaptiveLH: return "adaptive-lh";
  }
  return "?";
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::None: return "none";
    case Branch::High: return "high";
    case Branch::Low: return "low";
  }
  return "?";
}

void PrecisionPolicy::validate() const {
  if (adaptive() && !(adp_tol > 0.0)) throw InvalidArgument("adaptive threshold must be positive");
  if (mantissa_bits(low) >= mantissa_bits(work))
    throw InvalidArgument("low precision must be narrower than the working precision");
  if (work != Precision::F64 || low != Precision::F32)
    throw InvalidArgument("only f64 working precision with f32 low precision is supported");
}

std::string PrecisionPolicy::label() const {
  std::string out = to_string(kind);
  if (adaptive()) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, adp_tol);
    out += ':';
    out.append(buf, r.ptr);
  }
  return out;
}

PrecisionPolicy PrecisionPolicy::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  PrecisionPolicy p;
  if (name == "uniform") {
    p = uniform();
  } else if (name == "fixed-low" || name == "fixedlow" || name == "fmp") {
    p = fixed_low();
  } else if (name == "adaptive-hl" || name == "hl" || name == "amp-hl") {
    p = adaptive_hl();
  } else if (name == "adaptive-lh" || name == "lh" || name == "amp-lh") {
    p = adaptive_lh();
  } else {
    throw InvalidArgument("unknown policy '" + name + "'");
  }
  if (colon != std::string::npos) {
    if (!p.adaptive()) throw InvalidArgument("policy '" + name + "' takes no threshold");
    const std::string tol = spec.substr(colon + 1);
    if (tol == "inf" || tol == "+inf") {
      p.adp_tol = std::numeric_limits<double>::infinity();
    } else {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tol.data(), tol.data() + tol.size(), v);
      if (ec != std::errc() || ptr != tol.data() + tol.size())
        throw InvalidArgument("cannot parse threshold '" + tol + "'");
      p.adp_tol = v;
    }
  }
  p.validate();
  return p;
}

Branch select_branch(const PrecisionPolicy& policy, double relres) noexcept {
  switch (policy.kind) {
    case PolicyKind::Uniform: return Branch::High;
    case PolicyKind::FixedLow: return Branch::Low;
    case PolicyKind::AdaptiveHL: return relres >= policy.adp_tol ? Branch::High : Branch::Low;
    case PolicyKind::AdaptiveLH: return relres >= policy.adp_tol ? Branch::Low : Branch::High;
  }
  return Branch::High;
}

MixedPreconditioner::MixedPreconditioner(const CsrMatrix<double>& a, const BjacParams& params,
                                         const PrecisionPolicy& policy, kernels::Exec exec)
    : policy_(policy), params_(params), rows_(a.rows()) {
  policy_.validate();
  if (policy_.needs_high()) high_.emplace(a, params, exec);
  if (policy_.needs_low()) low_.emplace(convert<float, double>(a), params, exec);
}

Branch MixedPreconditioner::fmp_apply(std::span<const double> r, std::span<double> z, MixedWorkspace& ws) const {
  if (!low_) throw InvalidArgument("policy " + policy_.label() + " has no low-precision preconditioner");
  if (r.size() != rows_ || z.size() != rows_) throw DimensionMismatch("fmp_apply: vector length differs");
  ws.r_low.resize(rows_);
  ws.z_low.resize(rows_);
  convert_into<float, double>(r, ws.r_low);
  low_->apply(ws.r_low, ws.z_low, ws.low);
  convert_into<double, float>(ws.z_low, z);
  return Branch::Low;
}

Branch MixedPreconditioner::amp_apply(std::span<const double> r, double relres, std::span<double> z,
                                      MixedWorkspace& ws) const {
  const Branch b = select_branch(policy_, relres);
  if (b == Branch::Low) return fmp_apply(r, z, ws);
  high_->apply(r, z, ws.high);
  return Branch::High;
}

std::vector<double> MixedPreconditioner::fmp_apply(std::span<const double> r) const {
  std::vector<double> z(rows_);
  MixedWorkspace ws;
  fmp_apply(r, z, ws);
  return z;
}

std::vector<double> MixedPreconditioner::amp_apply(std::span<const double> r, double relres, Branch* taken) const {
  std::vector<double> z(rows_);
  MixedWorkspace ws;
  const Branch b = amp_apply(r, relres, z, ws);
  if (taken) *taken = b;
  return z;
}

}  // namespace mpbjac
