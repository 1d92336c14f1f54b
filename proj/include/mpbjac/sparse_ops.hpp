#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mpbjac/csr_matrix.hpp"
#include "mpbjac/error.hpp"
#include "mpbjac/kernels.hpp"
#include "mpbjac/precision.hpp"

namespace mpbjac {

using kernels::Exec;

/// Summation order of inner products. Strict is a single left-to-right pass;
/// BlockTree sums fixed-size chunks first (parallel, still reproducible).
enum class Reduction { Strict, BlockTree };

template <Scalar T>
std::vector<T> spmv(const CsrMatrix<T>& a, std::span<const T> x, Exec exec = Exec::Parallel) {
  if (x.size() != a.cols())
    throw DimensionMismatch("spmv: matrix has " + std::to_string(a.cols()) + " columns, vector has " +
                            std::to_string(x.size()) + " entries");
  std::vector<T> y(a.rows());
  kernels::spmv<T>(exec, a, x, y);
  return y;
}

template <Scalar T>
T dot(std::span<const T> x, std::span<const T> y, Reduction mode = Reduction::Strict,
      Exec exec = Exec::Parallel) {
  if (x.size() != y.size())
    throw DimensionMismatch("dot: lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  if (mode == Reduction::Strict) return kernels::serial::dot(x, y);
  return exec == Exec::Parallel ? kernels::omp::dot_blocked(x, y) : kernels::serial::dot_blocked(x, y);
}

/// Euclidean norm accumulated in double whatever the storage precision.
template <Scalar T>
double norm2(std::span<const T> x, Reduction mode = Reduction::Strict, Exec exec = Exec::Parallel) {
  if (mode == Reduction::Strict) return std::sqrt(kernels::serial::sum_squares_wide(x));
  return std::sqrt(exec == Exec::Parallel ? kernels::omp::sum_squares_wide_blocked(x)
                                          : kernels::serial::sum_squares_wide_blocked(x));
}

/// Round every entry to the nearest `To` value (ties to even). Finite values
/// beyond the target range raise PrecisionOverflow instead of becoming inf.
template <Scalar To, Scalar From>
void convert_into(std::span<const From> in, std::span<To> out) {
  if (in.size() != out.size()) throw DimensionMismatch("convert: output length differs from input");
  if constexpr (sizeof(To) < sizeof(From)) {
    for (std::size_t i = 0; i < in.size(); ++i) {
      const From v = in[i];
      // Values just above max that still round to max are fine; anything that
      // rounds to inf is not.
      const To w = static_cast<To>(v);
      if (std::isinf(w) && std::isfinite(v)) throw PrecisionOverflow(i, static_cast<double>(v));
      out[i] = w;
    }
  } else {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = static_cast<To>(in[i]);
  }
}

template <Scalar To, Scalar From>
std::vector<To> convert(std::span<const From> in) {
  std::vector<To> out(in.size());
  convert_into<To, From>(in, out);
  return out;
}

template <Scalar To, Scalar From>
CsrMatrix<To> convert(const CsrMatrix<From>& a) {
  return CsrMatrix<To>(a.pattern(), convert<To, From>(a.values()));
}

/// Precision-tagged dense vector.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::vector<double> v) : data_(std::move(v)) {}
  explicit DenseVector(std::vector<float> v) : data_(std::move(v)) {}

  Precision precision() const noexcept {
    return std::holds_alternative<std::vector<double>>(data_) ? Precision::F64 : Precision::F32;
  }
  std::size_t size() const noexcept {
    return std::visit([](const auto& v) { return v.size(); }, data_);
  }

  /// Typed access; throws PrecisionMismatch if the tag differs.
  template <Scalar T>
  const std::vector<T>& as() const {
    if (const auto* p = std::get_if<std::vector<T>>(&data_)) return *p;
    throw PrecisionMismatch(std::string("vector holds ") + std::string(to_string(precision())) + ", requested " +
                            std::string(to_string(precision_of<T>)));
  }

  /// Entry i widened to double.
  double operator[](std::size_t i) const {
    return std::visit([i](const auto& v) { return static_cast<double>(v[i]); }, data_);
  }

  const auto& variant() const noexcept { return data_; }

 private:
  std::variant<std::vector<double>, std::vector<float>> data_;
};

/// Precision-tagged CSR matrix.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(CsrMatrix<double> a) : data_(std::move(a)) {}  // NOLINT(google-explicit-constructor)
  SparseMatrix(CsrMatrix<float> a) : data_(std::move(a)) {}   // NOLINT(google-explicit-constructor)

  Precision precision() const noexcept {
    return std::holds_alternative<CsrMatrix<double>>(data_) ? Precision::F64 : Precision::F32;
  }
  std::size_t rows() const noexcept {
    return std::visit([](const auto& a) { return a.rows(); }, data_);
  }
  std::size_t cols() const noexcept {
    return std::visit([](const auto& a) { return a.cols(); }, data_);
  }
  std::size_t nnz() const noexcept {
    return std::visit([](const auto& a) { return a.nnz(); }, data_);
  }

  template <Scalar T>
  const CsrMatrix<T>& as() const {
    if (const auto* p = std::get_if<CsrMatrix<T>>(&data_)) return *p;
    throw PrecisionMismatch(std::string("matrix holds ") + std::string(to_string(precision())) + ", requested " +
                            std::string(to_string(precision_of<T>)));
  }

  const auto& variant() const noexcept { return data_; }

 private:
  std::variant<CsrMatrix<double>, CsrMatrix<float>> data_;
};

DenseVector spmv(const SparseMatrix& a, const DenseVector& x);

/// Inner product in the operands' precision, returned widened.
double dot(const DenseVector& x, const DenseVector& y, Reduction mode = Reduction::Strict);

double norm2(const DenseVector& x, Reduction mode = Reduction::Strict);

DenseVector convert_precision(const DenseVector& v, Precision target);
SparseMatrix convert_precision(const SparseMatrix& a, Precision target);

}  // namespace mpbjac
