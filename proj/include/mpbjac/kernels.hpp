#pragma once

// Row-parallel sparse and dense kernels. Every kernel exists twice: a serial
// reference in kernels::serial and an OpenMP version in kernels::omp. The
// OpenMP versions assign each output element to exactly one thread and keep
// the per-element operation order of the reference, so both produce
// bit-identical results for any thread count.

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mpbjac/csr_matrix.hpp"

namespace mpbjac::kernels {

enum class Exec { Serial, Parallel };

/// Chunk length of the blocked reduction. Fixed so the summation tree depends
/// only on the vector length.
inline constexpr std::size_t kReductionChunk = 2048;

namespace detail {

template <Scalar T>
inline T row_dot(const offset_t* rp, const index_t* ci, const T* av, const T* x, std::size_t i) {
  T sum = T(0);
  for (offset_t p = rp[i]; p < rp[i + 1]; ++p) sum += av[p] * x[ci[p]];
  return sum;
}

// Sum over the row's entries in [begin, end): the in-block part of row i.
template <Scalar T>
inline T row_dot_range(offset_t begin, offset_t end, const index_t* ci, const T* av, const T* x) {
  T sum = T(0);
  for (offset_t p = begin; p < end; ++p) sum += av[p] * x[ci[p]];
  return sum;
}

}  // namespace detail

/// Per-block data needed by the masked Jacobi sweeps.
template <Scalar T>
struct BlockSweepData {
  const CsrMatrix<T>* matrix = nullptr;
  std::span<const offset_t> inblock_begin;  // first entry of row i inside its block
  std::span<const offset_t> inblock_end;    // one past the last such entry
  std::span<const T> diag;
};

namespace serial {

/// y = A x
template <Scalar T>
void spmv(const CsrMatrix<T>& a, std::span<const T> x, std::span<T> y) {
  const auto* rp = a.row_ptr().data();
  const auto* ci = a.col_idx().data();
  const auto* av = a.values().data();
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = detail::row_dot(rp, ci, av, x.data(), i);
}

/// out = r - A z
template <Scalar T>
void residual(const CsrMatrix<T>& a, std::span<const T> r, std::span<const T> z, std::span<T> out) {
  const auto* rp = a.row_ptr().data();
  const auto* ci = a.col_idx().data();
  const auto* av = a.values().data();
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = r[i] - detail::row_dot(rp, ci, av, z.data(), i);
}

/// Left-to-right sum in the operand precision.
template <Scalar T>
T dot(std::span<const T> x, std::span<const T> y) {
  T sum = T(0);
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

/// Chunked sum: each chunk of kReductionChunk is summed left to right, then
/// the chunk partials are summed left to right.
template <Scalar T>
T dot_blocked(std::span<const T> x, std::span<const T> y) {
  T total = T(0);
  for (std::size_t c = 0; c < x.size(); c += kReductionChunk) {
    const std::size_t end = std::min(x.size(), c + kReductionChunk);
    T part = T(0);
    for (std::size_t i = c; i < end; ++i) part += x[i] * y[i];
    total += part;
  }
  return total;
}

/// Sum of squares with every entry widened to double first.
template <Scalar T>
double sum_squares_wide(std::span<const T> x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = static_cast<double>(x[i]);
    sum += v * v;
  }
  return sum;
}

template <Scalar T>
double sum_squares_wide_blocked(std::span<const T> x) {
  double total = 0.0;
  for (std::size_t c = 0; c < x.size(); c += kReductionChunk) {
    const std::size_t end = std::min(x.size(), c + kReductionChunk);
    double part = 0.0;
    for (std::size_t i = c; i < end; ++i) {
      const double v = static_cast<double>(x[i]);
      part += v * v;
    }
    total += part;
  }
  return total;
}

/// t Jacobi sweeps on A_b y = rhs_b from a zero start, for one block [begin, end).
/// `scratch` must have the same length as `y`; only the block's range is touched.
template <Scalar T>
void block_sweeps(const BlockSweepData<T>& d, std::size_t begin, std::size_t end, int sweeps,
                  std::span<const T> rhs, std::span<T> y, std::span<T> scratch) {
  const auto* ci = d.matrix->col_idx().data();
  const auto* av = d.matrix->values().data();
  const T* dg = d.diag.data();

  for (std::size_t i = begin; i < end; ++i) y[i] = rhs[i] / dg[i];

  T* cur = y.data();
  T* nxt = scratch.data();
  for (int m = 1; m < sweeps; ++m) {
    for (std::size_t i = begin; i < end; ++i) {
      const T ay = detail::row_dot_range(d.inblock_begin[i], d.inblock_end[i], ci, av, cur);
      nxt[i] = cur[i] + (rhs[i] - ay) / dg[i];
    }
    std::swap(cur, nxt);
  }
  if (cur != y.data()) {
    for (std::size_t i = begin; i < end; ++i) y[i] = cur[i];
  }
}

template <Scalar T>
void axpy(T alpha, std::span<const T> x, std::span<T> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

/// p = z + beta p
template <Scalar T>
void xpby(std::span<const T> z, T beta, std::span<T> p) {
  for (std::size_t i = 0; i < z.size(); ++i) p[i] = z[i] + beta * p[i];
}

}  // namespace serial

namespace omp {

template <Scalar T>
void spmv(const CsrMatrix<T>& a, std::span<const T> x, std::span<T> y) {
  const auto* rp = a.row_ptr().data();
  const auto* ci = a.col_idx().data();
  const auto* av = a.values().data();
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = detail::row_dot(rp, ci, av, x.data(), i);
}

template <Scalar T>
void residual(const CsrMatrix<T>& a, std::span<const T> r, std::span<const T> z, std::span<T> out) {
  const auto* rp = a.row_ptr().data();
  const auto* ci = a.col_idx().data();
  const auto* av = a.values().data();
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = r[i] - detail::row_dot(rp, ci, av, z.data(), i);
}

/// Same grouping as serial::dot_blocked; chunks are computed in parallel and
/// combined in chunk order.
template <Scalar T>
T dot_blocked(std::span<const T> x, std::span<const T> y) {
  const std::size_t chunks = (x.size() + kReductionChunk - 1) / kReductionChunk;
  std::vector<T> partial(chunks);
  const auto nc = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < nc; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t end = std::min(x.size(), begin + kReductionChunk);
    T part = T(0);
    for (std::size_t i = begin; i < end; ++i) part += x[i] * y[i];
    partial[c] = part;
  }
  T total = T(0);
  for (T p : partial) total += p;
  return total;
}

template <Scalar T>
double sum_squares_wide_blocked(std::span<const T> x) {
  const std::size_t chunks = (x.size() + kReductionChunk - 1) / kReductionChunk;
  std::vector<double> partial(chunks);
  const auto nc = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < nc; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t end = std::min(x.size(), begin + kReductionChunk);
    double part = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = static_cast<double>(x[i]);
      part += v * v;
    }
    partial[c] = part;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

/// Blocks are independent, so they are distributed across threads.
template <Scalar T>
void all_block_sweeps(const BlockSweepData<T>& d, std::span<const std::size_t> offsets, int sweeps,
                      std::span<const T> rhs, std::span<T> y, std::span<T> scratch) {
  const auto nb = static_cast<std::ptrdiff_t>(offsets.size() - 1);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < nb; ++b)
    serial::block_sweeps(d, offsets[b], offsets[b + 1], sweeps, rhs, y, scratch);
}

template <Scalar T>
void axpy(T alpha, std::span<const T> x, std::span<T> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <Scalar T>
void xpby(std::span<const T> z, T beta, std::span<T> p) {
  const auto n = static_cast<std::ptrdiff_t>(z.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
}

}  // namespace omp

// Dispatch helpers used by the solver layers.

template <Scalar T>
void spmv(Exec e, const CsrMatrix<T>& a, std::span<const T> x, std::span<T> y) {
  e == Exec::Parallel ? omp::spmv(a, x, y) : serial::spmv(a, x, y);
}

template <Scalar T>
void residual(Exec e, const CsrMatrix<T>& a, std::span<const T> r, std::span<const T> z, std::span<T> out) {
  e == Exec::Parallel ? omp::residual(a, r, z, out) : serial::residual(a, r, z, out);
}

template <Scalar T>
void axpy(Exec e, T alpha, std::span<const T> x, std::span<T> y) {
  e == Exec::Parallel ? omp::axpy(alpha, x, y) : serial::axpy(alpha, x, y);
}

template <Scalar T>
void xpby(Exec e, std::span<const T> z, T beta, std::span<T> p) {
  e == Exec::Parallel ? omp::xpby(z, beta, p) : serial::xpby(z, beta, p);
}

}  // namespace mpbjac::kernels
