#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mpbjac/precision.hpp"

namespace mpbjac {

using index_t = std::int32_t;   // column index
using offset_t = std::int64_t;  // position in the value array

/// Row structure shared between precision copies of one matrix.
/// Rows are sorted by column and free of duplicates.
struct CsrPattern {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<offset_t> row_ptr{0};
  std::vector<index_t> col_idx;

  std::size_t nnz() const noexcept { return col_idx.size(); }

  /// Throws InvalidArgument if any structural invariant is violated.
  void validate() const;
};

/// Square or rectangular compressed-sparse-row matrix with scalars of type T.
/// Values are immutable after construction; the pattern is shared, so
/// converting precision copies only the value array.
template <Scalar T>
class CsrMatrix {
 public:
  using value_type = T;

  CsrMatrix();
  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<offset_t> row_ptr,
            std::vector<index_t> col_idx, std::vector<T> values);
  CsrMatrix(std::shared_ptr<const CsrPattern> pattern, std::vector<T> values);

  static CsrMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return pattern_->rows; }
  std::size_t cols() const noexcept { return pattern_->cols; }
  std::size_t nnz() const noexcept { return pattern_->nnz(); }
  bool square() const noexcept { return rows() == cols(); }
  static constexpr Precision precision() noexcept { return precision_of<T>; }

  std::span<const offset_t> row_ptr() const noexcept { return pattern_->row_ptr; }
  std::span<const index_t> col_idx() const noexcept { return pattern_->col_idx; }
  std::span<const T> values() const noexcept { return values_; }

  const std::shared_ptr<const CsrPattern>& pattern() const noexcept { return pattern_; }

  /// Position of entry (i, j) in the value array, if stored.
  std::optional<offset_t> find(std::size_t i, std::size_t j) const;

  /// Stored value of (i, j), or zero.
  T at(std::size_t i, std::size_t j) const;

 private:
  std::shared_ptr<const CsrPattern> pattern_;
  std::vector<T> values_;
};

extern template class CsrMatrix<double>;
extern template class CsrMatrix<float>;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Assembles a matrix from unordered coordinate entries. Duplicates are summed.
CsrMatrix<double> csr_from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

/// Structure and value bits identical (distinguishes -0.0 from 0.0, NaN payloads).
template <Scalar T>
bool bitwise_equal(const CsrMatrix<T>& a, const CsrMatrix<T>& b);

template <Scalar T>
bool bitwise_equal(const std::vector<T>& a, const std::vector<T>& b);

}  // namespace mpbjac
