#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpbjac/csr_matrix.hpp"

namespace mpbjac {

/// max|a_ij| / min|a_ij| over the stored nonzero off-diagonals of row i.
/// Empty when the row has no such entry.
std::optional<double> row_multiscale(const CsrMatrix<double>& a, std::size_t row);

/// |a_ii| / sum_{j != i} |a_ij|; +inf when the off-diagonal sum is zero.
double row_dominance(const CsrMatrix<double>& a, std::size_t row);

double row_sum(const CsrMatrix<double>& a, std::size_t row);

/// Decade edges 1, 10, ..., 1e16.
std::vector<double> decade_edges();
/// Edges 1, 2, 4, 10, 100, 1000.
std::vector<double> anisotropy_edges();

struct MultiscaleHistogram {
  std::vector<double> edges;         // lower edges; last bin extends to +inf
  std::vector<std::size_t> counts;   // one per edge
  std::size_t undefined_count = 0;   // rows with no nonzero off-diagonal
  std::size_t total_rows = 0;

  double percent(std::size_t bin) const;
};

/// Bins are lower-inclusive: [edges[b], edges[b+1]).
MultiscaleHistogram multiscale_histogram(const CsrMatrix<double>& a, const std::vector<double>& edges);

struct DominanceStats {
  double min_dominance = 0.0;
  double median_dominance = 0.0;  // lower middle element
  double max_dominance = 0.0;
  double fraction_dominant = 0.0;  // rows with dominance > 1
  double min_row_sum = 0.0;
  double max_row_sum = 0.0;
  std::size_t rows = 0;
};

DominanceStats dominance_stats(const CsrMatrix<double>& a);

/// Necessary sign conditions for an M-matrix; not a full verification.
struct SignCheckReport {
  static constexpr std::size_t kMaxSamples = 10;

  bool diag_positive = true;
  bool offdiag_nonpositive = true;
  bool rowsums_nonnegative = true;
  std::vector<std::pair<std::size_t, std::size_t>> diag_violations;
  std::vector<std::pair<std::size_t, std::size_t>> offdiag_violations;
  std::vector<std::pair<std::size_t, std::size_t>> rowsum_violations;

  bool all() const noexcept { return diag_positive && offdiag_nonpositive && rowsums_nonnegative; }
};

/// Row sums are compared against a rounding allowance of
/// (entries in row) * eps * sum_j |a_ij|, so exactly balanced rows assembled
/// in floating point are not flagged.
SignCheckReport m_matrix_sign_check(const CsrMatrix<double>& a);

/// edge_low,edge_high,count,percent (plus a trailing "undefined" row).
void write_histogram_csv(std::ostream& os, const MultiscaleHistogram& h);
void write_histogram_csv(const std::filesystem::path& path, const MultiscaleHistogram& h);

nlohmann::ordered_json to_json(const MultiscaleHistogram& h);
nlohmann::ordered_json to_json(const DominanceStats& s);
nlohmann::ordered_json to_json(const SignCheckReport& r);

}  // namespace mpbjac
