#include <gtest/gtest.h>

#include <cmath>

#include "mpbjac/csr_matrix.hpp"
#include "mpbjac/error.hpp"

namespace mpbjac {
namespace {

TEST(CsrMatrix, ValidatesStructure) {
  EXPECT_NO_THROW(CsrMatrix<double>(2, 2, {0, 1, 2}, {0, 1}, {1.0, 2.0}));
  EXPECT_THROW(CsrMatrix<double>(2, 2, {0, 1}, {0}, {1.0}), InvalidArgument);            // row_ptr too short
  EXPECT_THROW(CsrMatrix<double>(2, 2, {1, 1, 2}, {0, 1}, {1.0, 2.0}), InvalidArgument);  // nonzero start
  EXPECT_THROW(CsrMatrix<double>(2, 2, {0, 2, 1}, {0, 1}, {1.0, 2.0}), InvalidArgument);  // decreasing
  EXPECT_THROW(CsrMatrix<double>(2, 2, {0, 1, 2}, {0, 2}, {1.0, 2.0}), InvalidArgument);  // column range
  EXPECT_THROW(CsrMatrix<double>(1, 2, {0, 2}, {1, 0}, {1.0, 2.0}), InvalidArgument);     // unsorted row
  EXPECT_THROW(CsrMatrix<double>(1, 2, {0, 2}, {1, 1}, {1.0, 2.0}), InvalidArgument);     // duplicate
  EXPECT_THROW(CsrMatrix<double>(2, 2, {0, 1, 2}, {0, 1}, {1.0}), InvalidArgument);       // value count
}

TEST(CsrMatrix, FindAndAt) {
  CsrMatrix<double> a(2, 3, {0, 2, 3}, {0, 2, 1}, {4.0, 5.0, 6.0});
  EXPECT_EQ(a.find(0, 2).value(), 1);
  EXPECT_FALSE(a.find(0, 1).has_value());
  EXPECT_EQ(a.at(1, 1), 6.0);
  EXPECT_EQ(a.at(1, 0), 0.0);
  EXPECT_FALSE(a.square());
}

TEST(CsrMatrix, Identity) {
  const auto id = CsrMatrix<float>::identity(4);
  EXPECT_EQ(id.nnz(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(id.at(i, i), 1.0f);
}

TEST(CsrFromTriplets, SortsAndSumsDuplicates) {
  const auto a = csr_from_triplets(2, 2, {{1, 0, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {0, 0, -1.0}});
  EXPECT_EQ(a.nnz(), 3u);
  EXPECT_EQ(a.at(0, 0), -1.0);
  EXPECT_EQ(a.at(0, 1), 2.0);
  EXPECT_EQ(a.at(1, 0), 4.0);
  EXPECT_THROW(csr_from_triplets(2, 2, {{2, 0, 1.0}}), InvalidArgument);
}

TEST(BitwiseEqual, DistinguishesSignedZero) {
  EXPECT_TRUE(bitwise_equal(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0}));
  EXPECT_FALSE(bitwise_equal(std::vector<double>{0.0}, std::vector<double>{-0.0}));
  EXPECT_FALSE(bitwise_equal(std::vector<double>{0.0}, std::vector<double>{0.0, 0.0}));
  const auto nan = std::nan("");
  EXPECT_TRUE(bitwise_equal(std::vector<double>{nan}, std::vector<double>{nan}));
}

}  // namespace
}  // namespace mpbjac
