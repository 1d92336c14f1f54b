#include "mpbjac/bjac.hpp"

#include <algorithm>
#include <string>

#include "mpbjac/error.hpp"

namespace mpbjac {

BlockPartition BlockPartition::equal_split(std::size_t n, std::size_t nb) {
  if (nb < 1) throw InvalidArgument("block count must be at least 1");
  if (nb > n)
    throw InvalidArgument("block count " + std::to_string(nb) + " exceeds the number of rows " + std::to_string(n));
  std::vector<std::size_t> offsets(nb + 1, 0);
  const std::size_t base = n / nb;
  const std::size_t extra = n % nb;
  for (std::size_t b = 0; b < nb; ++b) offsets[b + 1] = offsets[b] + base + (b < extra ? 1 : 0);
  return BlockPartition(std::move(offsets));
}

BlockPartition::BlockPartition(std::vector<std::size_t> offsets) : offsets_(std::move(offsets)) {
  if (offsets_.size() < 2 || offsets_.front() != 0) throw InvalidArgument("partition must start at row 0");
  for (std::size_t b = 0; b + 1 < offsets_.size(); ++b)
    if (offsets_[b + 1] <= offsets_[b]) throw InvalidArgument("partition blocks must be non-empty and ordered");
}

template <Scalar T>
BjacPreconditioner<T>::BjacPreconditioner(CsrMatrix<T> a, const BjacParams& params, kernels::Exec exec)
    : matrix_(std::move(a)),
      partition_(BlockPartition::equal_split(matrix_.rows(), params.blocks)),
      outer_(params.outer),
      inner_(params.inner),
      exec_(exec) {
  init();
}

template <Scalar T>
BjacPreconditioner<T>::BjacPreconditioner(CsrMatrix<T> a, BlockPartition partition, int outer, int inner,
                                          kernels::Exec exec)
    : matrix_(std::move(a)), partition_(std::move(partition)), outer_(outer), inner_(inner), exec_(exec) {
  init();
}

template <Scalar T>
void BjacPreconditioner<T>::init() {
  if (!matrix_.square()) throw DimensionMismatch("block-Jacobi requires a square matrix");
  if (partition_.rows() != matrix_.rows()) throw DimensionMismatch("partition does not cover the matrix rows");
  if (outer_ < 1 || inner_ < 1) throw InvalidArgument("outer and inner sweep counts must be at least 1");

  const std::size_t n = matrix_.rows();
  const auto rp = matrix_.row_ptr();
  const auto ci = matrix_.col_idx();
  const auto av = matrix_.values();
  diag_.resize(n);
  inblock_begin_.resize(n);
  inblock_end_.resize(n);

  for (std::size_t b = 0; b < partition_.blocks(); ++b) {
    const auto lo = static_cast<index_t>(partition_.begin(b));
    const auto hi = static_cast<index_t>(partition_.end(b));
    for (std::size_t i = partition_.begin(b); i < partition_.end(b); ++i) {
      const auto first = ci.begin() + rp[i];
      const auto last = ci.begin() + rp[i + 1];
      inblock_begin_[i] = std::lower_bound(first, last, lo) - ci.begin();
      inblock_end_[i] = std::lower_bound(first, last, hi) - ci.begin();
      const auto d = std::lower_bound(first, last, static_cast<index_t>(i));
      if (d == last || *d != static_cast<index_t>(i) || av[d - ci.begin()] == T(0)) throw MissingDiagonal(i);
      diag_[i] = av[d - ci.begin()];
    }
  }
}

template <Scalar T>
kernels::BlockSweepData<T> BjacPreconditioner<T>::sweep_data() const {
  return {&matrix_, inblock_begin_, inblock_end_, diag_};
}

template <Scalar T>
void BjacPreconditioner<T>::inner_apply(std::size_t block, std::span<const T> r, std::span<T> y,
                                        std::span<T> scratch) const {
  if (block >= partition_.blocks()) throw InvalidArgument("block index out of range");
  if (r.size() != rows() || y.size() != rows() || scratch.size() != rows())
    throw DimensionMismatch("inner_apply: vectors must span all rows");
  kernels::serial::block_sweeps(sweep_data(), partition_.begin(block), partition_.end(block), inner_, r, y, scratch);
}

template <Scalar T>
void BjacPreconditioner<T>::block_diagonal_apply(std::span<const T> r, std::span<T> y, std::span<T> scratch) const {
  const auto data = sweep_data();
  if (exec_ == kernels::Exec::Parallel) {
    kernels::omp::all_block_sweeps(data, partition_.offsets(), inner_, r, y, scratch);
  } else {
    for (std::size_t b = 0; b < partition_.blocks(); ++b)
      kernels::serial::block_sweeps(data, partition_.begin(b), partition_.end(b), inner_, r, y, scratch);
  }
}

template <Scalar T>
void BjacPreconditioner<T>::block_diagonal_apply(std::span<const T> r, std::span<T> y, std::span<T> scratch,
                                                 std::span<const std::size_t> order) const {
  if (order.size() != partition_.blocks()) throw InvalidArgument("block order must list every block once");
  std::vector<bool> seen(order.size(), false);
  for (std::size_t b : order) {
    if (b >= order.size() || seen[b]) throw InvalidArgument("block order must be a permutation");
    seen[b] = true;
  }
  const auto data = sweep_data();
  for (std::size_t b : order)
    kernels::serial::block_sweeps(data, partition_.begin(b), partition_.end(b), inner_, r, y, scratch);
}

template <Scalar T>
void BjacPreconditioner<T>::apply(std::span<const T> r, std::span<T> z, BjacWorkspace<T>& ws) const {
  const std::size_t n = rows();
  if (r.size() != n || z.size() != n) throw DimensionMismatch("bjac apply: vector length differs from matrix size");
  ws.resize(n);

  // First outer sweep from z = 0 reduces to z = Dhat^{-1} r.
  block_diagonal_apply(r, z, ws.sweep);
  for (int j = 1; j < outer_; ++j) {
    kernels::residual<T>(exec_, matrix_, r, z, ws.residual);
    block_diagonal_apply(ws.residual, ws.correction, ws.sweep);
    kernels::axpy<T>(exec_, T(1), ws.correction, z);
  }
}

template <Scalar T>
std::vector<T> BjacPreconditioner<T>::apply(std::span<const T> r) const {
  std::vector<T> z(rows());
  BjacWorkspace<T> ws;
  apply(r, z, ws);
  return z;
}

template class BjacPreconditioner<double>;
template class BjacPreconditioner<float>;

}  // namespace mpbjac
