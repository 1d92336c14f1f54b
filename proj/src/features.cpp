#include "mpbjac/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>

#include "mpbjac/error.hpp"

namespace mpbjac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

nlohmann::ordered_json json_number(double v) {
  // JSON has no infinity.
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

std::optional<double> row_multiscale(const CsrMatrix<double>& a, std::size_t row) {
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto av = a.values();
  double lo = kInf, hi = 0.0;
  bool any = false;
  for (offset_t p = rp[row]; p < rp[row + 1]; ++p) {
    if (static_cast<std::size_t>(ci[p]) == row) continue;
    const double m = std::abs(av[p]);
    if (m == 0.0) continue;
    any = true;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  if (!any) return std::nullopt;
  return hi / lo;
}

double row_dominance(const CsrMatrix<double>& a, std::size_t row) {
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto av = a.values();
  double diag = 0.0, off = 0.0;
  for (offset_t p = rp[row]; p < rp[row + 1]; ++p) {
    if (static_cast<std::size_t>(ci[p]) == row)
      diag = std::abs(av[p]);
    else
      off += std::abs(av[p]);
  }
  return off == 0.0 ? kInf : diag / off;
}

double row_sum(const CsrMatrix<double>& a, std::size_t row) {
  const auto rp = a.row_ptr();
  const auto av = a.values();
  double s = 0.0;
  for (offset_t p = rp[row]; p < rp[row + 1]; ++p) s += av[p];
  return s;
}

std::vector<double> decade_edges() {
  std::vector<double> e;
  double v = 1.0;
  for (int k = 0; k <= 16; ++k, v *= 10.0) e.push_back(v);
  return e;
}

std::vector<double> anisotropy_edges() { return {1.0, 2.0, 4.0, 10.0, 100.0, 1000.0}; }

double MultiscaleHistogram::percent(std::size_t bin) const {
  return total_rows == 0 ? 0.0 : 100.0 * static_cast<double>(counts.at(bin)) / static_cast<double>(total_rows);
}

MultiscaleHistogram multiscale_histogram(const CsrMatrix<double>& a, const std::vector<double>& edges) {
  if (edges.empty()) throw InvalidArgument("histogram needs at least one edge");
  if (edges.front() > 1.0) throw InvalidArgument("first histogram edge must be <= 1");
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (!(edges[k] > edges[k - 1])) throw InvalidArgument("histogram edges must be strictly ascending");

  MultiscaleHistogram h;
  h.edges = edges;
  h.counts.assign(edges.size(), 0);
  h.total_rows = a.rows();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto tau = row_multiscale(a, i);
    if (!tau) {
      ++h.undefined_count;
      continue;
    }
    // Last edge not greater than tau; tau >= 1 >= edges[0].
    const auto it = std::upper_bound(edges.begin(), edges.end(), *tau);
    ++h.counts[static_cast<std::size_t>(it - edges.begin()) - 1];
  }
  return h;
}

DominanceStats dominance_stats(const CsrMatrix<double>& a) {
  if (!a.square()) throw DimensionMismatch("dominance_stats requires a square matrix");
  DominanceStats s;
  s.rows = a.rows();
  if (a.rows() == 0) return s;
  std::vector<double> dom(a.rows());
  std::size_t dominant = 0;
  s.min_row_sum = kInf;
  s.max_row_sum = -kInf;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    dom[i] = row_dominance(a, i);
    if (dom[i] > 1.0) ++dominant;
    const double rs = row_sum(a, i);
    s.min_row_sum = std::min(s.min_row_sum, rs);
    s.max_row_sum = std::max(s.max_row_sum, rs);
  }
  std::sort(dom.begin(), dom.end());
  s.min_dominance = dom.front();
  s.max_dominance = dom.back();
  s.median_dominance = dom[(dom.size() - 1) / 2];
  s.fraction_dominant = static_cast<double>(dominant) / static_cast<double>(a.rows());
  return s;
}

SignCheckReport m_matrix_sign_check(const CsrMatrix<double>& a) {
  if (!a.square()) throw DimensionMismatch("m_matrix_sign_check requires a square matrix");
  SignCheckReport rep;
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto av = a.values();
  auto note = [](bool& flag, auto& samples, std::size_t i, std::size_t j) {
    flag = false;
    if (samples.size() < SignCheckReport::kMaxSamples) samples.emplace_back(i, j);
  };
  for (std::size_t i = 0; i < a.rows(); ++i) {
    bool has_diag = false;
    double sum = 0.0, abs_sum = 0.0;
    for (offset_t p = rp[i]; p < rp[i + 1]; ++p) {
      const auto j = static_cast<std::size_t>(ci[p]);
      const double v = av[p];
      sum += v;
      abs_sum += std::abs(v);
      if (j == i) {
        has_diag = true;
        if (!(v > 0.0)) note(rep.diag_positive, rep.diag_violations, i, i);
      } else if (v > 0.0) {
        note(rep.offdiag_nonpositive, rep.offdiag_violations, i, j);
      }
    }
    if (!has_diag) note(rep.diag_positive, rep.diag_violations, i, i);
    const double allowance =
        static_cast<double>(rp[i + 1] - rp[i]) * std::numeric_limits<double>::epsilon() * abs_sum;
    if (sum < -allowance) note(rep.rowsums_nonnegative, rep.rowsum_violations, i, i);
  }
  return rep;
}

void write_histogram_csv(std::ostream& os, const MultiscaleHistogram& h) {
  os << "edge_low,edge_high,count,percent\n";
  for (std::size_t b = 0; b < h.edges.size(); ++b) {
    os << fmt(h.edges[b]) << ',' << (b + 1 < h.edges.size() ? fmt(h.edges[b + 1]) : std::string("inf")) << ','
       << h.counts[b] << ',' << fmt(h.percent(b)) << '\n';
  }
  const double undef_pct =
      h.total_rows == 0 ? 0.0 : 100.0 * static_cast<double>(h.undefined_count) / static_cast<double>(h.total_rows);
  os << "undefined,undefined," << h.undefined_count << ',' << fmt(undef_pct) << '\n';
}

void write_histogram_csv(const std::filesystem::path& path, const MultiscaleHistogram& h) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_histogram_csv(out, h);
  if (!out) throw IoError("error writing " + path.string());
}

nlohmann::ordered_json to_json(const MultiscaleHistogram& h) {
  nlohmann::ordered_json j;
  j["edges"] = h.edges;
  j["counts"] = h.counts;
  j["undefined_count"] = h.undefined_count;
  j["total_rows"] = h.total_rows;
  return j;
}

nlohmann::ordered_json to_json(const DominanceStats& s) {
  nlohmann::ordered_json j;
  j["rows"] = s.rows;
  j["min_dominance"] = json_number(s.min_dominance);
  j["median_dominance"] = json_number(s.median_dominance);
  j["max_dominance"] = json_number(s.max_dominance);
  j["fraction_dominant"] = s.fraction_dominant;
  j["min_row_sum"] = json_number(s.min_row_sum);
  j["max_row_sum"] = json_number(s.max_row_sum);
  return j;
}

nlohmann::ordered_json to_json(const SignCheckReport& r) {
  auto pairs = [](const auto& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [i, j] : v) arr.push_back({i, j});
    return arr;
  };
  nlohmann::ordered_json j;
  j["diag_positive"] = r.diag_positive;
  j["offdiag_nonpositive"] = r.offdiag_nonpositive;
  j["rowsums_nonnegative"] = r.rowsums_nonnegative;
  j["diag_violations"] = pairs(r.diag_violations);
  j["offdiag_violations"] = pairs(r.offdiag_violations);
  j["rowsum_violations"] = pairs(r.rowsum_violations);
  return j;
}

}  // namespace mpbjac
