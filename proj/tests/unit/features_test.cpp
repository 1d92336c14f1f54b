#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "mpbjac/error.hpp"
#include "mpbjac/features.hpp"
#include "mpbjac/problemgen.hpp"
#include "test_support.hpp"

namespace mpbjac {
namespace {

// Direct definition with no shared code: scan the dense row.
std::optional<double> tau_oracle(const CsrMatrix<double>& a, std::size_t i) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double v = std::abs(a.at(i, j));
    if (j == i || v == 0.0) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == 0.0) return std::nullopt;
  return hi / lo;
}

std::vector<std::size_t> histogram_oracle(const CsrMatrix<double>& a, const std::vector<double>& edges) {
  std::vector<std::size_t> counts(edges.size(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto t = tau_oracle(a, i);
    if (!t) continue;
    std::size_t bin = 0;
    for (std::size_t b = 0; b < edges.size(); ++b)
      if (*t >= edges[b]) bin = b;
    ++counts[bin];
  }
  return counts;
}

TEST(Multiscale, RowValues) {
  CsrMatrix<double> a(3, 3, {0, 3, 5, 6}, {0, 1, 2, 0, 1, 2}, {5.0, -2.0, 8.0, -1.0, 3.0, 7.0});
  EXPECT_EQ(row_multiscale(a, 0), 4.0);
  EXPECT_EQ(row_multiscale(a, 1), 1.0);
  EXPECT_FALSE(row_multiscale(a, 2).has_value());
  CsrMatrix<double> z(1, 3, {0, 3}, {0, 1, 2}, {1.0, 0.0, 2.0});  // stored zero ignored
  EXPECT_EQ(row_multiscale(z, 0), 1.0);
}

TEST(Multiscale, ScaleInvariant) {
  const auto sys = build_diffusion_system(GridSpec{5}, CoefficientField::random(1000.0, 1));
  std::vector<double> scaled(sys.matrix.values().begin(), sys.matrix.values().end());
  for (auto& v : scaled) v *= -3.5;
  const CsrMatrix<double> b(sys.matrix.pattern(), scaled);
  for (std::size_t i = 0; i < b.rows(); ++i)
    EXPECT_NEAR(*row_multiscale(b, i), *row_multiscale(sys.matrix, i), 1e-12 * *row_multiscale(b, i));
}

TEST(Multiscale, AnisotropicEqualsStrength) {
  for (int n : {2, 4, 8})
    for (double s : {2.0, 4.0, 10.0, 100.0, 1000.0}) {
      const auto sys = build_diffusion_system(GridSpec{n}, CoefficientField::anisotropic(s));
      for (std::size_t i = 0; i < sys.matrix.rows(); ++i) EXPECT_EQ(row_multiscale(sys.matrix, i), s);
    }
}

TEST(Histogram, MatchesBruteForce) {
  for (const auto& f : {CoefficientField::random(1000.0, 3), CoefficientField::discontinuous(1000.0),
                        CoefficientField::anisotropic(10.0)}) {
    const auto sys = build_diffusion_system(GridSpec{7}, f);
    for (const auto& edges : {decade_edges(), anisotropy_edges()}) {
      const auto h = multiscale_histogram(sys.matrix, edges);
      EXPECT_EQ(h.counts, histogram_oracle(sys.matrix, edges));
      EXPECT_EQ(h.undefined_count, 0u);
      EXPECT_EQ(h.total_rows, sys.matrix.rows());
    }
  }
}

TEST(Histogram, LowerInclusiveBins) {
  const auto sys = build_diffusion_system(GridSpec{4}, CoefficientField::anisotropic(1000.0));
  const auto h = multiscale_histogram(sys.matrix, decade_edges());
  EXPECT_EQ(h.counts[3], sys.matrix.rows());  // [1e3, 1e4)
  EXPECT_EQ(h.percent(3), 100.0);
  const auto c = multiscale_histogram(build_diffusion_system(GridSpec{4}, CoefficientField::constant()).matrix,
                                      decade_edges());
  EXPECT_EQ(c.percent(0), 100.0);
}

TEST(Histogram, IdentityIsUndefined) {
  const auto h = multiscale_histogram(CsrMatrix<double>::identity(6), decade_edges());
  EXPECT_EQ(h.undefined_count, 6u);
  for (auto c : h.counts) EXPECT_EQ(c, 0u);
}

TEST(Histogram, EdgeValidation) {
  const auto a = CsrMatrix<double>::identity(2);
  EXPECT_THROW(multiscale_histogram(a, {}), InvalidArgument);
  EXPECT_THROW(multiscale_histogram(a, {2.0, 3.0}), InvalidArgument);
  EXPECT_THROW(multiscale_histogram(a, {1.0, 1.0}), InvalidArgument);
}

TEST(Histogram, Csv) {
  const auto sys = build_diffusion_system(GridSpec{3}, CoefficientField::constant());
  std::ostringstream os;
  write_histogram_csv(os, multiscale_histogram(sys.matrix, {1.0, 10.0}));
  EXPECT_EQ(os.str(), "edge_low,edge_high,count,percent\n1,10,27,100\n10,inf,0,0\nundefined,undefined,0,0\n");
}

TEST(Dominance, Stats) {
  const auto sys = build_diffusion_system(GridSpec{3}, CoefficientField::constant());
  const auto s = dominance_stats(sys.matrix);
  // Centre row: 6 / 6; corner rows: 6 / 3.
  EXPECT_EQ(s.min_dominance, 1.0);
  EXPECT_EQ(s.max_dominance, 2.0);
  EXPECT_EQ(s.fraction_dominant, 26.0 / 27.0);
  EXPECT_EQ(s.min_row_sum, 0.0);
  EXPECT_EQ(row_dominance(CsrMatrix<double>::identity(1), 0), std::numeric_limits<double>::infinity());
  const auto j = to_json(dominance_stats(CsrMatrix<double>::identity(2)));
  EXPECT_EQ(j.at("max_dominance"), "inf");
}

TEST(SignCheck, FlagsViolations) {
  CsrMatrix<double> a(3, 3, {0, 2, 4, 5}, {0, 1, 0, 1, 2}, {-1.0, 2.0, -3.0, 1.0, 4.0});
  const auto r = m_matrix_sign_check(a);
  EXPECT_FALSE(r.diag_positive);
  EXPECT_FALSE(r.offdiag_nonpositive);
  EXPECT_FALSE(r.rowsums_nonnegative);
  EXPECT_EQ(r.diag_violations.front(), (std::pair<std::size_t, std::size_t>{0, 0}));
  EXPECT_EQ(r.offdiag_violations.front(), (std::pair<std::size_t, std::size_t>{0, 1}));
  EXPECT_EQ(r.rowsum_violations.front(), (std::pair<std::size_t, std::size_t>{1, 1}));
  EXPECT_FALSE(r.all());
  EXPECT_TRUE(m_matrix_sign_check(testing::laplacian_1d(5)).all());
}

}  // namespace
}  // namespace mpbjac
