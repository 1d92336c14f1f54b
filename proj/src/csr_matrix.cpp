#include "mpbjac/csr_matrix.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <string>

#include "mpbjac/error.hpp"

namespace mpbjac {

void CsrPattern::validate() const {
  if (row_ptr.size() != rows + 1)
    throw InvalidArgument("row_ptr has length " + std::to_string(row_ptr.size()) + ", expected " +
                          std::to_string(rows + 1));
  if (row_ptr.front() != 0) throw InvalidArgument("row_ptr[0] must be 0");
  if (static_cast<std::size_t>(row_ptr.back()) != col_idx.size())
    throw InvalidArgument("row_ptr[n] does not match the number of stored entries");
  if (cols > static_cast<std::size_t>(std::numeric_limits<index_t>::max()))
    throw InvalidArgument("column count exceeds the index type");
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_ptr[i + 1] < row_ptr[i]) throw InvalidArgument("row_ptr decreases at row " + std::to_string(i));
    for (offset_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      const index_t c = col_idx[p];
      if (c < 0 || static_cast<std::size_t>(c) >= cols)
        throw InvalidArgument("column index " + std::to_string(c) + " out of range in row " + std::to_string(i));
      if (p > row_ptr[i] && col_idx[p - 1] >= c)
        throw InvalidArgument("row " + std::to_string(i) + " is not strictly sorted by column");
    }
  }
}

template <Scalar T>
CsrMatrix<T>::CsrMatrix() : pattern_(std::make_shared<const CsrPattern>()) {}

template <Scalar T>
CsrMatrix<T>::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<offset_t> row_ptr,
                        std::vector<index_t> col_idx, std::vector<T> values) {
  auto p = std::make_shared<CsrPattern>();
  p->rows = rows;
  p->cols = cols;
  p->row_ptr = std::move(row_ptr);
  p->col_idx = std::move(col_idx);
  p->validate();
  if (values.size() != p->nnz()) throw InvalidArgument("value array length differs from col_idx length");
  pattern_ = std::move(p);
  values_ = std::move(values);
}

template <Scalar T>
CsrMatrix<T>::CsrMatrix(std::shared_ptr<const CsrPattern> pattern, std::vector<T> values)
    : pattern_(std::move(pattern)), values_(std::move(values)) {
  if (!pattern_) throw InvalidArgument("null pattern");
  if (values_.size() != pattern_->nnz()) throw InvalidArgument("value array length differs from pattern");
}

template <Scalar T>
CsrMatrix<T> CsrMatrix<T>::identity(std::size_t n) {
  std::vector<offset_t> rp(n + 1);
  std::vector<index_t> ci(n);
  for (std::size_t i = 0; i < n; ++i) {
    rp[i + 1] = static_cast<offset_t>(i + 1);
    ci[i] = static_cast<index_t>(i);
  }
  return CsrMatrix(n, n, std::move(rp), std::move(ci), std::vector<T>(n, T(1)));
}

template <Scalar T>
std::optional<offset_t> CsrMatrix<T>::find(std::size_t i, std::size_t j) const {
  if (i >= rows()) return std::nullopt;
  const auto ci = col_idx();
  const auto first = ci.begin() + row_ptr()[i];
  const auto last = ci.begin() + row_ptr()[i + 1];
  const auto it = std::lower_bound(first, last, static_cast<index_t>(j));
  if (it == last || *it != static_cast<index_t>(j)) return std::nullopt;
  return static_cast<offset_t>(it - ci.begin());
}

template <Scalar T>
T CsrMatrix<T>::at(std::size_t i, std::size_t j) const {
  const auto p = find(i, j);
  return p ? values_[*p] : T(0);
}

template class CsrMatrix<double>;
template class CsrMatrix<float>;

CsrMatrix<double> csr_from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries) {
  for (const auto& e : entries) {
    if (e.row >= rows || e.col >= cols)
      throw InvalidArgument("entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) + ") out of bounds");
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });

  std::vector<offset_t> rp(rows + 1, 0);
  std::vector<index_t> ci;
  std::vector<double> vals;
  ci.reserve(entries.size());
  vals.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col) {
      vals.back() += e.value;
      continue;
    }
    ci.push_back(static_cast<index_t>(e.col));
    vals.push_back(e.value);
    ++rp[e.row + 1];
  }
  for (std::size_t i = 0; i < rows; ++i) rp[i + 1] += rp[i];
  return CsrMatrix<double>(rows, cols, std::move(rp), std::move(ci), std::move(vals));
}

template <Scalar T>
bool bitwise_equal(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0);
}

template <Scalar T>
bool bitwise_equal(const CsrMatrix<T>& a, const CsrMatrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nnz() != b.nnz()) return false;
  const auto ra = a.row_ptr(), rb = b.row_ptr();
  const auto ca = a.col_idx(), cb = b.col_idx();
  const auto va = a.values(), vb = b.values();
  return std::equal(ra.begin(), ra.end(), rb.begin()) && std::equal(ca.begin(), ca.end(), cb.begin()) &&
         (va.empty() || std::memcmp(va.data(), vb.data(), va.size() * sizeof(T)) == 0);
}

template bool bitwise_equal(const std::vector<double>&, const std::vector<double>&);
template bool bitwise_equal(const std::vector<float>&, const std::vector<float>&);
template bool bitwise_equal(const CsrMatrix<double>&, const CsrMatrix<double>&);
template bool bitwise_equal(const CsrMatrix<float>&, const CsrMatrix<float>&);

}  // namespace mpbjac
