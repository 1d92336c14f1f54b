#include "cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "mpbjac/features.hpp"
#include "mpbjac/matrix_market.hpp"
#include "mpbjac/problemgen.hpp"

namespace mpbjac::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw IoError("error writing " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

CoefficientField field_of(const ProblemConfig& p) {
  switch (parse_coefficient_kind(p.family)) {
    case CoefficientKind::Const: return CoefficientField::constant();
    case CoefficientKind::Ani: return CoefficientField::anisotropic(p.s);
    case CoefficientKind::Dis: return CoefficientField::discontinuous(p.s);
    case CoefficientKind::Rand: return CoefficientField::random(p.s, p.seed);
  }
  return {};
}

}  // namespace

LoadedProblem resolve_problem(const ProblemConfig& p) {
  if (!(p.p_diag >= 0.0)) throw ConfigError("pdiag must be non-negative");
  LoadedProblem prob{CsrMatrix<double>::identity(0), {}};
  if (p.matrix) {
    prob.matrix = mm_read(*p.matrix);
    if (!prob.matrix.square()) throw ConfigError("matrix " + p.matrix->string() + " is not square");
    if (p.rhs_file) {
      prob.rhs = read_vector(*p.rhs_file);
      if (prob.rhs.size() != prob.matrix.rows())
        throw ConfigError("right-hand side length differs from matrix size");
    } else {
      prob.rhs.assign(prob.matrix.rows(), 1.0);
    }
  } else {
    auto sys = build_diffusion_system(GridSpec{p.n}, field_of(p), parse_rhs_kind(p.rhs), p.rhs_seed);
    prob.matrix = std::move(sys.matrix);
    prob.rhs = std::move(sys.rhs);
  }
  if (p.p_diag > 0.0) prob.matrix = diag_augment(prob.matrix, p.p_diag);
  return prob;
}

std::vector<PrecisionPolicy> effective_policies(const ExperimentConfig& cfg) {
  if (cfg.policies.empty()) throw ConfigError("at least one policy is required");
  auto list = cfg.policies;
  const bool has_uniform =
      std::any_of(list.begin(), list.end(), [](const auto& p) { return p.kind == PolicyKind::Uniform; });
  if (cfg.solve.baseline && !has_uniform) list.insert(list.begin(), PrecisionPolicy::uniform());
  return list;
}

SolveConfig solve_config(const ExperimentConfig& cfg, std::size_t rows) {
  SolveConfig sc;
  sc.res_tol = cfg.solve.res_tol;
  sc.max_iter = cfg.solve.max_iter.value_or(SolveConfig::default_max_iter(rows));
  sc.true_residual_stride = cfg.solve.trace_stride.value_or(rows <= 32768 ? 1 : 10);
  sc.reduction = cfg.solve.reduction;
  sc.validate();
  return sc;
}

BjacParams bjac_params(const ExperimentConfig& cfg, std::size_t rows) {
  if (cfg.precond.nb < 1) throw ConfigError("nb must be at least 1");
  if (cfg.precond.k < 1 || cfg.precond.t < 1) throw ConfigError("k and t must be at least 1");
  return {std::min(cfg.precond.nb, std::max<std::size_t>(rows, 1)), cfg.precond.k, cfg.precond.t};
}

std::vector<PolicyRun> run_policies(const ExperimentConfig& cfg, const LoadedProblem& prob) {
  const auto rows = prob.matrix.rows();
  const auto sc = solve_config(cfg, rows);
  const auto params = bjac_params(cfg, rows);
  std::vector<PolicyRun> runs;
  for (const auto& policy : effective_policies(cfg)) {
    const auto t0 = std::chrono::steady_clock::now();
    MixedPreconditioner m(prob.matrix, params, policy);
    const double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto report = pcg_solve(prob.matrix, prob.rhs, m, sc);
    report.setup_time = setup;
    runs.push_back({policy, std::move(report)});
  }
  return runs;
}

std::string policy_stem(const PrecisionPolicy& p) {
  std::string s = p.label();
  std::replace(s.begin(), s.end(), ':', '_');
  return s;
}

int cmd_gen(const ExperimentConfig& cfg, std::ostream& out) {
  const auto prob = resolve_problem(cfg.problem);
  ensure_dir(cfg.out);
  mm_write(prob.matrix, cfg.out / "matrix.mtx");
  write_vector(prob.rhs, cfg.out / "rhs.mtx");
  json meta;
  meta["problem"] = problem_descriptor(cfg, prob.matrix.rows(), prob.matrix.nnz());
  meta["config"] = config_echo(cfg);
  write_json(cfg.out / "metadata.json", meta);
  out << "N=" << prob.matrix.rows() << '\n' << "nnz=" << prob.matrix.nnz() << '\n';
  return kOk;
}

int cmd_solve(const ExperimentConfig& cfg, std::ostream& out) {
  const auto prob = resolve_problem(cfg.problem);
  ensure_dir(cfg.out);
  const auto runs = run_policies(cfg, prob);
  const auto descriptor = problem_descriptor(cfg, prob.matrix.rows(), prob.matrix.nnz());
  const auto echo = config_echo(cfg);
  const auto params = bjac_params(cfg, prob.matrix.rows());
  const json effective = {{"nb", params.blocks}, {"k", params.outer}, {"t", params.inner}};

  const PolicyRun* baseline = nullptr;
  for (const auto& r : runs)
    if (r.policy.kind == PolicyKind::Uniform) {
      baseline = &r;
      break;
    }

  std::ofstream table(cfg.out / "comparison.csv", std::ios::trunc);
  if (!table) throw IoError("cannot open " + (cfg.out / "comparison.csv").string() + " for writing");
  table << "policy,status,iterations,iter_ratio,speedup,divergence,total_time,final_true_relres\n";

  bool all_converged = true;
  for (const auto& r : runs) {
    const auto stem = policy_stem(r.policy);
    write_trace_csv(cfg.out / (stem + ".trace.csv"), r.report.trace, cfg.solve.timing);
    auto summary = summary_json(r.report);
    summary["problem"] = descriptor;
    summary["config"] = echo;
    summary["preconditioner"] = effective;
    write_json(cfg.out / (stem + ".summary.json"), summary);
    all_converged = all_converged && r.report.converged();

    std::string ratio, sp, div;
    if (baseline && baseline->report.iterations > 0) {
      ratio = fmt(static_cast<double>(r.report.iterations) / static_cast<double>(baseline->report.iterations));
      if (baseline->report.converged() && r.report.converged() && r.report.total_time > 0.0)
        sp = fmt(speedup(baseline->report, r.report));
      const auto d = detect_divergence(baseline->report.trace, r.report.trace, cfg.solve.delta_log10);
      div = d ? std::to_string(*d) : "none";
    }
    table << r.policy.label() << ',' << to_string(r.report.status) << ',' << r.report.iterations << ',' << ratio
          << ',' << sp << ',' << div << ',' << fmt(r.report.total_time) << ','
          << fmt(r.report.final_true_relres) << '\n';
    out << r.policy.label() << ": " << to_string(r.report.status) << " after " << r.report.iterations
        << " iterations, true relres " << fmt(r.report.final_true_relres) << ", " << fmt(r.report.total_time)
        << " s\n";
  }
  if (!table) throw IoError("error writing comparison.csv");
  return all_converged ? kOk : kNotConverged;
}

int cmd_analyze(const ExperimentConfig& cfg, std::ostream& out) {
  const auto prob = resolve_problem(cfg.problem);
  ensure_dir(cfg.out);
  const auto hist = multiscale_histogram(prob.matrix, cfg.edges);
  write_histogram_csv(cfg.out / "multiscale.csv", hist);
  json j;
  j["problem"] = problem_descriptor(cfg, prob.matrix.rows(), prob.matrix.nnz());
  j["config"] = config_echo(cfg);
  j["multiscale"] = to_json(hist);
  if (prob.matrix.rows() > 0) j["dominance"] = to_json(dominance_stats(prob.matrix));
  j["sign_check"] = to_json(m_matrix_sign_check(prob.matrix));
  write_json(cfg.out / "features.json", j);

  for (std::size_t b = 0; b < hist.edges.size(); ++b) {
    if (hist.counts[b] == 0) continue;
    out << '[' << fmt(hist.edges[b]) << ", "
        << (b + 1 < hist.edges.size() ? fmt(hist.edges[b + 1]) : std::string("inf")) << "): " << hist.counts[b]
        << " rows (" << fmt(hist.percent(b)) << "%)\n";
  }
  if (hist.undefined_count > 0) out << "undefined: " << hist.undefined_count << " rows\n";
  return kOk;
}

int cmd_compare(const std::string& trace_a, const std::string& trace_b, double delta_log10, std::ostream& out) {
  auto summary_path = [](const std::string& trace) {
    const std::string suffix = ".trace.csv";
    if (trace.size() <= suffix.size() || trace.compare(trace.size() - suffix.size(), suffix.size(), suffix) != 0)
      throw ConfigError("trace file name must end in .trace.csv: " + trace);
    return fs::path(trace.substr(0, trace.size() - suffix.size()) + ".summary.json");
  };
  const auto ta = read_trace_csv(trace_a);
  const auto tb = read_trace_csv(trace_b);
  const auto sa = read_json(summary_path(trace_a));
  const auto sb = read_json(summary_path(trace_b));
  if (!sa.contains("problem") || !sb.contains("problem") || sa["problem"] != sb["problem"])
    throw ConfigError("traces come from different problems");

  const auto ia = sa.at("iterations").get<std::size_t>();
  const auto ib = sb.at("iterations").get<std::size_t>();
  out << "iter_a=" << ia << '\n' << "iter_b=" << ib << '\n';
  out << "ratio=" << (ia > 0 ? fmt(static_cast<double>(ib) / static_cast<double>(ia)) : std::string("n/a")) << '\n';
  const double time_b = sb.at("total_time").get<double>();
  const bool both = sa.at("converged").get<bool>() && sb.at("converged").get<bool>();
  out << "speedup="
      << (both && time_b > 0.0 ? fmt(sa.at("total_time").get<double>() / time_b) : std::string("n/a")) << '\n';
  const auto d = detect_divergence(ta, tb, delta_log10);
  out << "divergence=" << (d ? std::to_string(*d) : std::string("none")) << '\n';
  return kOk;
}

namespace {

struct Overrides {
  std::optional<std::string> config, problem, rhs, rhs_file, matrix, edges, reduction, out;
  std::optional<int> n, k, t;
  std::optional<double> s, res_tol, pdiag, delta;
  std::optional<std::uint64_t> seed, rhs_seed;
  std::optional<std::size_t> nb, max_iter, stride;
  std::vector<std::string> policies;
  bool no_timing = false, no_baseline = false;
};

void add_problem_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "INI experiment file");
  cmd->add_option("--problem", o.problem, "coefficient family: const, ani, dis, rand");
  cmd->add_option("--n", o.n, "interior grid points per axis");
  cmd->add_option("--s", o.s, "family strength");
  cmd->add_option("--seed", o.seed, "seed for rand coefficients");
  cmd->add_option("--rhs", o.rhs, "right-hand side: ones or random");
  cmd->add_option("--rhs-seed", o.rhs_seed, "seed for a random right-hand side");
  cmd->add_option("--rhs-file", o.rhs_file, "right-hand side vector for --matrix");
  cmd->add_option("--matrix", o.matrix, "Matrix Market file instead of a generated problem");
  cmd->add_option("--pdiag", o.pdiag, "diagonal augmentation factor");
  cmd->add_option("--out", o.out, "output directory");
}

void add_solve_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--nb", o.nb, "number of blocks");
  cmd->add_option("--k", o.k, "outer iterations");
  cmd->add_option("--t", o.t, "inner sweeps per block");
  cmd->add_option("--policy", o.policies, "kind[:adp_tol], repeatable");
  cmd->add_option("--res-tol", o.res_tol, "relative residual tolerance");
  cmd->add_option("--max-iter", o.max_iter, "iteration limit");
  cmd->add_option("--stride", o.stride, "true residual every this many iterations (0: end only)");
  cmd->add_option("--reduction", o.reduction, "strict or blocktree");
  cmd->add_option("--delta", o.delta, "divergence threshold in decades");
  cmd->add_flag("--no-timing", o.no_timing, "leave the wall_time column empty");
  cmd->add_flag("--no-baseline", o.no_baseline, "do not add the uniform baseline");
}

ExperimentConfig build_config(const Overrides& o) {
  ExperimentConfig cfg = o.config ? load_config(*o.config) : ExperimentConfig{};
  auto& p = cfg.problem;
  if (o.problem) p.family = *o.problem;
  if (o.n) p.n = *o.n;
  if (o.s) p.s = *o.s;
  if (o.seed) p.seed = *o.seed;
  if (o.rhs) p.rhs = *o.rhs;
  if (o.rhs_seed) p.rhs_seed = *o.rhs_seed;
  if (o.rhs_file) p.rhs_file = *o.rhs_file;
  if (o.matrix) p.matrix = *o.matrix;
  if (o.pdiag) p.p_diag = *o.pdiag;
  if (o.out) cfg.out = *o.out;
  if (o.nb) cfg.precond.nb = *o.nb;
  if (o.k) cfg.precond.k = *o.k;
  if (o.t) cfg.precond.t = *o.t;
  if (!o.policies.empty()) {
    cfg.policies.clear();
    for (const auto& spec : o.policies) {
      try {
        cfg.policies.push_back(PrecisionPolicy::parse(spec));
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (o.res_tol) cfg.solve.res_tol = *o.res_tol;
  if (o.max_iter) cfg.solve.max_iter = *o.max_iter;
  if (o.stride) cfg.solve.trace_stride = *o.stride;
  if (o.reduction) cfg.solve.reduction = parse_reduction(*o.reduction);
  if (o.delta) cfg.solve.delta_log10 = *o.delta;
  if (o.no_timing) cfg.solve.timing = false;
  if (o.no_baseline) cfg.solve.baseline = false;
  if (o.edges) cfg.edges = parse_edges(*o.edges);
  return cfg;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed-precision block Jacobi PCG experiments"};
  app.require_subcommand(1);
  Overrides o;

  auto* gen = app.add_subcommand("gen", "generate a system and write it as Matrix Market");
  add_problem_options(gen, o);

  auto* solve = app.add_subcommand("solve", "run PCG for each policy and write traces");
  add_problem_options(solve, o);
  add_solve_options(solve, o);

  auto* analyze = app.add_subcommand("analyze", "multiscale histogram and sign checks");
  add_problem_options(analyze, o);
  analyze->add_option("--edges", o.edges, "comma separated edges, 'decade' or 'anisotropy'");

  std::string trace_a, trace_b;
  double delta = 0.5;
  auto* compare = app.add_subcommand("compare", "compare two solve traces");
  compare->add_option("trace_a", trace_a, "baseline trace CSV")->required();
  compare->add_option("trace_b", trace_b, "other trace CSV")->required();
  compare->add_option("--delta", delta, "divergence threshold in decades");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (compare->parsed()) return cmd_compare(trace_a, trace_b, delta, out);
    const auto cfg = build_config(o);
    if (gen->parsed()) return cmd_gen(cfg, out);
    if (solve->parsed()) return cmd_solve(cfg, out);
    return cmd_analyze(cfg, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const PrecisionOverflow& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace mpbjac::cli
