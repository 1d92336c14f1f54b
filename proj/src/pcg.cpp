#include "mpbjac/pcg.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "mpbjac/error.hpp"

namespace mpbjac {

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::IndefiniteOperator: return "indefinite_operator";
    case SolveStatus::Breakdown: return "breakdown";
    case SolveStatus::NonFinite: return "non_finite";
  }
  return "?";
}

std::size_t SolveConfig::default_max_iter(std::size_t rows) {
  return std::clamp<std::size_t>(10 * rows, 1, 20000);
}

void SolveConfig::validate() const {
  if (!(res_tol > 0.0)) throw InvalidArgument("res_tol must be positive");
  if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
}

double true_relres(const CsrMatrix<double>& a, std::span<const double> x, std::span<const double> b,
                   double r0_norm, Reduction mode) {
  if (r0_norm == 0.0) throw InvalidArgument("true_relres: initial residual norm is zero");
  if (x.size() != a.cols() || b.size() != a.rows()) throw DimensionMismatch("true_relres: vector length differs");
  std::vector<double> r(a.rows());
  kernels::residual<double>(kernels::Exec::Parallel, a, b, x, r);
  return norm2<double>(r, mode) / r0_norm;
}

SolveReport pcg_solve(const CsrMatrix<double>& a, std::span<const double> b, const MixedPreconditioner& precond,
                      const SolveConfig& cfg, std::span<const double> x0) {
  cfg.validate();
  const std::size_t n = a.rows();
  if (!a.square()) throw DimensionMismatch("pcg: matrix must be square");
  if (b.size() != n) throw DimensionMismatch("pcg: right-hand side length differs from matrix size");
  if (!x0.empty() && x0.size() != n) throw DimensionMismatch("pcg: initial guess length differs from matrix size");
  if (precond.rows() != n) throw DimensionMismatch("pcg: preconditioner size differs from matrix size");

  const auto exec = cfg.exec;
  const auto mode = cfg.reduction;
  auto dotp = [&](std::span<const double> u, std::span<const double> v) { return dot<double>(u, v, mode, exec); };

  SolveReport rep;
  rep.policy = precond.policy();
  rep.solution.assign(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), rep.solution.begin());
  auto& x = rep.solution;

  std::vector<double> r(n), z(n), p(n), ap(n);
  kernels::residual<double>(exec, a, b, x, r);
  const double r0_norm = norm2<double>(r, mode, exec);

  const auto t0 = Clock::now();
  Clock::duration diagnostics{};
  auto elapsed = [&] { return seconds(Clock::now() - t0 - diagnostics); };

  rep.trace.push_back({0, 1.0, 1.0, Branch::None, 0.0});
  if (r0_norm == 0.0) {
    rep.trace.back().implicit_relres = 0.0;
    rep.trace.back().true_relres = 0.0;
    rep.status = SolveStatus::Converged;
    return rep;
  }
  if (!std::isfinite(r0_norm)) {
    rep.status = SolveStatus::NonFinite;
    rep.failed_iteration = 0;
    return rep;
  }

  MixedWorkspace ws;
  double relres = 1.0;
  double rho_prev = 0.0;
  rep.status = SolveStatus::MaxIterations;

  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    const Branch branch = precond.amp_apply(r, relres, z, ws);
    (branch == Branch::High ? rep.high_applications : rep.low_applications)++;

    const double rho = dotp(r, z);
    if (!std::isfinite(rho)) {
      rep.status = SolveStatus::NonFinite;
      rep.failed_iteration = it;
      break;
    }
    if (rho == 0.0) {
      rep.status = SolveStatus::Breakdown;
      rep.failed_iteration = it;
      break;
    }
    if (it == 1) {
      std::copy(z.begin(), z.end(), p.begin());
    } else {
      kernels::xpby<double>(exec, z, rho / rho_prev, p);
    }
    rho_prev = rho;

    kernels::spmv<double>(exec, a, p, ap);
    const double pap = dotp(p, ap);
    if (!std::isfinite(pap)) {
      rep.status = SolveStatus::NonFinite;
      rep.failed_iteration = it;
      break;
    }
    if (pap <= 0.0) {
      rep.status = SolveStatus::IndefiniteOperator;
      rep.failed_iteration = it;
      break;
    }
    const double alpha = rho / pap;
    kernels::axpy<double>(exec, alpha, p, x);
    kernels::axpy<double>(exec, -alpha, ap, r);

    relres = norm2<double>(r, mode, exec) / r0_norm;
    IterationRecord rec{it, relres, std::nullopt, branch, 0.0};
    if (!std::isfinite(relres)) {
      rec.wall_time = elapsed();
      rep.trace.push_back(rec);
      rep.iterations = it;
      rep.status = SolveStatus::NonFinite;
      rep.failed_iteration = it;
      break;
    }
    const bool done = relres <= cfg.res_tol;
    const bool last = done || it == cfg.max_iter;
    if (cfg.true_residual_stride != 0 && (it % cfg.true_residual_stride == 0 || last)) {
      const auto d0 = Clock::now();
      rec.true_relres = true_relres(a, x, b, r0_norm, mode);
      diagnostics += Clock::now() - d0;
    }
    rec.wall_time = elapsed();
    rep.trace.push_back(rec);
    rep.iterations = it;
    if (done) {
      rep.status = SolveStatus::Converged;
      break;
    }
  }

  rep.total_time = elapsed();
  rep.final_true_relres = rep.trace.back().true_relres.value_or(true_relres(a, x, b, r0_norm, mode));
  if (!rep.trace.back().true_relres) rep.trace.back().true_relres = rep.final_true_relres;
  return rep;
}

std::optional<std::size_t> detect_divergence(std::span<const IterationRecord> a, std::span<const IterationRecord> b,
                                             double delta_log10) {
  if (a.empty() || b.empty()) throw InvalidArgument("detect_divergence: traces must be non-empty");
  if (!(delta_log10 > 0.0)) throw InvalidArgument("detect_divergence: delta must be positive");
  constexpr double floor = std::numeric_limits<double>::min();
  // Traces are sorted by iteration; walk both in step.
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].iter < b[j].iter) {
      ++i;
    } else if (b[j].iter < a[i].iter) {
      ++j;
    } else {
      const double la = std::log10(std::max(a[i].implicit_relres, floor));
      const double lb = std::log10(std::max(b[j].implicit_relres, floor));
      if (std::abs(la - lb) > delta_log10) return a[i].iter;
      ++i;
      ++j;
    }
  }
  return std::nullopt;
}

double speedup(const SolveReport& uniform, const SolveReport& mixed) {
  if (!uniform.converged() || !mixed.converged()) throw InvalidArgument("speedup requires two converged solves");
  if (!(mixed.total_time > 0.0)) throw InvalidArgument("speedup: mixed solve time must be positive");
  return uniform.total_time / mixed.total_time;
}

void write_trace_csv(std::ostream& os, std::span<const IterationRecord> trace, bool include_timing) {
  os << "iter,implicit_relres,true_relres,precision_branch,wall_time\n";
  for (const auto& r : trace) {
    os << r.iter << ',' << fmt(r.implicit_relres) << ',';
    if (r.true_relres) os << fmt(*r.true_relres);
    os << ',' << to_string(r.branch) << ',';
    if (include_timing) os << fmt(r.wall_time);
    os << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, std::span<const IterationRecord> trace,
                     bool include_timing) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_trace_csv(out, trace, include_timing);
  if (!out) throw IoError("error writing " + path.string());
}

std::vector<IterationRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("iter,implicit_relres", 0) != 0)
    throw FormatError(path.string() + ": missing trace header");

  auto parse_double = [&](const std::string& tok, std::size_t lineno) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + tok + "'");
    return v;
  };

  std::vector<IterationRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
    if (!line.empty() && line.back() == ',') cols.emplace_back();
    if (cols.size() != 5) throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected 5 columns");
    IterationRecord r;
    r.iter = static_cast<std::size_t>(parse_double(cols[0], lineno));
    r.implicit_relres = parse_double(cols[1], lineno);
    if (!cols[2].empty()) r.true_relres = parse_double(cols[2], lineno);
    r.branch = cols[3] == "high" ? Branch::High : cols[3] == "low" ? Branch::Low : Branch::None;
    if (!cols[4].empty()) r.wall_time = parse_double(cols[4], lineno);
    out.push_back(r);
  }
  return out;
}

nlohmann::ordered_json summary_json(const SolveReport& report) {
  nlohmann::ordered_json j;
  j["converged"] = report.converged();
  j["status"] = to_string(report.status);
  j["iterations"] = report.iterations;
  j["final_implicit_relres"] = report.trace.empty() ? 1.0 : report.trace.back().implicit_relres;
  j["final_true_relres"] = report.final_true_relres;
  j["total_time"] = report.total_time;
  j["setup_time"] = report.setup_time;
  j["policy"] = {{"kind", to_string(report.policy.kind)},
                 {"adp_tol", report.policy.adp_tol},
                 {"low", std::string(to_string(report.policy.low))},
                 {"work", std::string(to_string(report.policy.work))},
                 {"label", report.policy.label()}};
  j["high_applications"] = report.high_applications;
  j["low_applications"] = report.low_applications;
  if (report.failed_iteration) j["failed_iteration"] = *report.failed_iteration;
  return j;
}

}  // namespace mpbjac
