#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mpbjac/csr_matrix.hpp"
#include "mpbjac/kernels.hpp"

namespace mpbjac {

/// Contiguous row ranges [offsets[b], offsets[b+1]).
class BlockPartition {
 public:
  /// nb blocks over n rows; the first n % nb blocks get one extra row.
  static BlockPartition equal_split(std::size_t n, std::size_t nb);

  /// Arbitrary contiguous layout. Offsets must start at 0, end at n, and increase strictly.
  explicit BlockPartition(std::vector<std::size_t> offsets);

  std::size_t blocks() const noexcept { return offsets_.size() - 1; }
  std::size_t rows() const noexcept { return offsets_.back(); }
  std::size_t begin(std::size_t b) const noexcept { return offsets_[b]; }
  std::size_t end(std::size_t b) const noexcept { return offsets_[b + 1]; }
  std::size_t size(std::size_t b) const noexcept { return end(b) - begin(b); }
  std::span<const std::size_t> offsets() const noexcept { return offsets_; }

 private:
  std::vector<std::size_t> offsets_;
};

struct BjacParams {
  std::size_t blocks = 32;
  int outer = 2;  // k: Neumann terms across blocks
  int inner = 2;  // t: Jacobi sweeps inside each block
};

/// Scratch space for one application; reuse it across calls to avoid allocation.
template <Scalar T>
struct BjacWorkspace {
  std::vector<T> residual;
  std::vector<T> correction;
  std::vector<T> sweep;

  void resize(std::size_t n) {
    residual.resize(n);
    correction.resize(n);
    sweep.resize(n);
  }
};

/// Block-Jacobi preconditioner applied as k outer sweeps
///     z <- z + Dhat^{-1} (r - A z),  z = 0 initially,
/// where Dhat^{-1} is t Jacobi sweeps on each diagonal block from zero.
/// This equals the truncated Neumann series of both levels.
///
/// All stored data and arithmetic are in T. The object is immutable after
/// construction and can be shared between threads.
template <Scalar T>
class BjacPreconditioner {
 public:
  /// Throws MissingDiagonal naming the first row whose diagonal is zero or
  /// absent, InvalidArgument for nb outside [1, n] or k, t < 1.
  BjacPreconditioner(CsrMatrix<T> a, const BjacParams& params, kernels::Exec exec = kernels::Exec::Parallel);
  BjacPreconditioner(CsrMatrix<T> a, BlockPartition partition, int outer, int inner,
                     kernels::Exec exec = kernels::Exec::Parallel);

  std::size_t rows() const noexcept { return matrix_.rows(); }
  const BlockPartition& partition() const noexcept { return partition_; }
  int outer() const noexcept { return outer_; }
  int inner() const noexcept { return inner_; }
  const CsrMatrix<T>& matrix() const noexcept { return matrix_; }
  std::span<const T> diagonal() const noexcept { return diag_; }
  static constexpr Precision precision() noexcept { return precision_of<T>; }

  /// z = M^{-1} r. `z` must not alias `r`.
  void apply(std::span<const T> r, std::span<T> z, BjacWorkspace<T>& ws) const;
  std::vector<T> apply(std::span<const T> r) const;

  /// t sweeps on block b only: reads r over the block's rows, writes y over the same rows.
  void inner_apply(std::size_t block, std::span<const T> r, std::span<T> y, std::span<T> scratch) const;

  /// Dhat^{-1} applied block by block in the given order (a permutation of
  /// 0..nb-1). Result is independent of the order.
  void block_diagonal_apply(std::span<const T> r, std::span<T> y, std::span<T> scratch,
                            std::span<const std::size_t> order) const;

 private:
  void init();
  void block_diagonal_apply(std::span<const T> r, std::span<T> y, std::span<T> scratch) const;
  kernels::BlockSweepData<T> sweep_data() const;

  CsrMatrix<T> matrix_;
  BlockPartition partition_;
  int outer_;
  int inner_;
  kernels::Exec exec_;
  std::vector<T> diag_;
  std::vector<offset_t> inblock_begin_;
  std::vector<offset_t> inblock_end_;
};

extern template class BjacPreconditioner<double>;
extern template class BjacPreconditioner<float>;

}  // namespace mpbjac
