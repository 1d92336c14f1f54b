#include "config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mpbjac/features.hpp"

namespace mpbjac::cli {

namespace pt = boost::property_tree;

std::vector<double> ExperimentConfig::decade_edges_default() { return decade_edges(); }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

template <class V>
V number(const std::string& key, const std::string& text) {
  V v{};
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  return v;
}

bool boolean(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::string reduction_name(Reduction r) { return r == Reduction::Strict ? "strict" : "blocktree"; }

Reduction parse_reduction(const std::string& s) {
  if (s == "strict") return Reduction::Strict;
  if (s == "blocktree") return Reduction::BlockTree;
  throw ConfigError("reduction must be strict or blocktree, got '" + s + "'");
}

std::vector<double> parse_edges(const std::string& spec) {
  const std::string s = trim(spec);
  if (s == "decade") return decade_edges();
  if (s == "anisotropy") return anisotropy_edges();
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(number<double>("edges", item));
  if (out.empty()) throw ConfigError("edge list is empty");
  return out;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    if (!std::filesystem::exists(path)) throw IoError("cannot open config " + path.string());
    throw ConfigError(std::string("config: ") + e.what());
  }

  ExperimentConfig cfg;
  static const std::set<std::string> sections{"problem", "preconditioner", "policies", "solve", "analyze", "output"};
  for (const auto& [section, body] : tree) {
    if (!sections.count(section)) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      const std::string v = trim(node.get_value<std::string>());
      if (section == "problem") {
        auto& p = cfg.problem;
        if (key == "family") p.family = v;
        else if (key == "n") p.n = number<int>(full, v);
        else if (key == "s") p.s = number<double>(full, v);
        else if (key == "seed") p.seed = number<std::uint64_t>(full, v);
        else if (key == "rhs") p.rhs = v;
        else if (key == "rhs_seed") p.rhs_seed = number<std::uint64_t>(full, v);
        else if (key == "pdiag") p.p_diag = number<double>(full, v);
        else if (key == "matrix") p.matrix = std::filesystem::path(v);
        else if (key == "rhs_file") p.rhs_file = std::filesystem::path(v);
        else throw ConfigError("config: unknown key " + full);
      } else if (section == "preconditioner") {
        if (key == "nb") cfg.precond.nb = number<std::size_t>(full, v);
        else if (key == "k") cfg.precond.k = number<int>(full, v);
        else if (key == "t") cfg.precond.t = number<int>(full, v);
        else throw ConfigError("config: unknown key " + full);
      } else if (section == "policies") {
        if (key != "list") throw ConfigError("config: unknown key " + full);
        cfg.policies.clear();
        for (const auto& item : split_list(v)) {
          try {
            cfg.policies.push_back(PrecisionPolicy::parse(item));
          } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("config: ") + e.what());
          }
        }
      } else if (section == "solve") {
        auto& s = cfg.solve;
        if (key == "res_tol") s.res_tol = number<double>(full, v);
        else if (key == "max_iter") s.max_iter = number<std::size_t>(full, v);
        else if (key == "trace_stride") s.trace_stride = number<std::size_t>(full, v);
        else if (key == "reduction") s.reduction = parse_reduction(v);
        else if (key == "timing") s.timing = boolean(full, v);
        else if (key == "baseline") s.baseline = boolean(full, v);
        else if (key == "delta") s.delta_log10 = number<double>(full, v);
        else throw ConfigError("config: unknown key " + full);
      } else if (section == "analyze") {
        if (key == "edges") cfg.edges = parse_edges(v);
        else throw ConfigError("config: unknown key " + full);
      } else if (section == "output") {
        if (key == "dir") cfg.out = v;
        else throw ConfigError("config: unknown key " + full);
      }
    }
  }
  return cfg;
}

nlohmann::ordered_json config_echo(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  const auto& p = cfg.problem;
  j["problem"] = {{"family", p.family}, {"n", p.n},       {"s", p.s},
                  {"seed", p.seed},     {"rhs", p.rhs},   {"rhs_seed", p.rhs_seed},
                  {"pdiag", p.p_diag}};
  if (p.matrix) j["problem"]["matrix"] = p.matrix->string();
  if (p.rhs_file) j["problem"]["rhs_file"] = p.rhs_file->string();
  j["preconditioner"] = {{"nb", cfg.precond.nb}, {"k", cfg.precond.k}, {"t", cfg.precond.t}};
  auto policies = nlohmann::ordered_json::array();
  for (const auto& pol : cfg.policies) policies.push_back(pol.label());
  j["policies"] = policies;
  j["solve"] = {{"res_tol", cfg.solve.res_tol},
                {"reduction", reduction_name(cfg.solve.reduction)},
                {"timing", cfg.solve.timing},
                {"baseline", cfg.solve.baseline},
                {"delta", cfg.solve.delta_log10}};
  if (cfg.solve.max_iter) j["solve"]["max_iter"] = *cfg.solve.max_iter;
  if (cfg.solve.trace_stride) j["solve"]["trace_stride"] = *cfg.solve.trace_stride;
  j["analyze"] = {{"edges", cfg.edges}};
  j["output"] = {{"dir", cfg.out.string()}};
  return j;
}

nlohmann::ordered_json problem_descriptor(const ExperimentConfig& cfg, std::size_t rows, std::size_t nnz) {
  nlohmann::ordered_json j;
  const auto& p = cfg.problem;
  if (p.matrix) {
    j["matrix"] = p.matrix->string();
    j["rhs_file"] = p.rhs_file ? p.rhs_file->string() : std::string("ones");
  } else {
    j["family"] = p.family;
    j["n"] = p.n;
    j["s"] = p.s;
    j["seed"] = p.seed;
    j["rhs"] = p.rhs;
    j["rhs_seed"] = p.rhs_seed;
  }
  j["pdiag"] = p.p_diag;
  j["rows"] = rows;
  j["nnz"] = nnz;
  return j;
}

}  // namespace mpbjac::cli
