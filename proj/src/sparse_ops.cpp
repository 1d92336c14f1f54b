#include "mpbjac/sparse_ops.hpp"

namespace mpbjac {

namespace {

[[noreturn]] void mismatch(const char* op, Precision a, Precision b) {
  throw PrecisionMismatch(std::string(op) + ": operands are " + std::string(to_string(a)) + " and " +
                          std::string(to_string(b)));
}

}  // namespace

DenseVector spmv(const SparseMatrix& a, const DenseVector& x) {
  if (a.precision() != x.precision()) mismatch("spmv", a.precision(), x.precision());
  return std::visit(
      [&x](const auto& m) {
        using T = typename std::decay_t<decltype(m)>::value_type;
        return DenseVector(spmv<T>(m, x.as<T>()));
      },
      a.variant());
}

double dot(const DenseVector& x, const DenseVector& y, Reduction mode) {
  if (x.precision() != y.precision()) mismatch("dot", x.precision(), y.precision());
  return std::visit(
      [&y, mode](const auto& xv) {
        using T = typename std::decay_t<decltype(xv)>::value_type;
        return static_cast<double>(dot<T>(xv, y.as<T>(), mode));
      },
      x.variant());
}

double norm2(const DenseVector& x, Reduction mode) {
  return std::visit(
      [mode](const auto& xv) {
        using T = typename std::decay_t<decltype(xv)>::value_type;
        return norm2<T>(xv, mode);
      },
      x.variant());
}

DenseVector convert_precision(const DenseVector& v, Precision target) {
  if (v.precision() == target) return v;
  if (target == Precision::F32) return DenseVector(convert<float, double>(v.as<double>()));
  return DenseVector(convert<double, float>(v.as<float>()));
}

SparseMatrix convert_precision(const SparseMatrix& a, Precision target) {
  if (a.precision() == target) return a;
  if (target == Precision::F32) return SparseMatrix(convert<float, double>(a.as<double>()));
  return SparseMatrix(convert<double, float>(a.as<float>()));
}

}  // namespace mpbjac
