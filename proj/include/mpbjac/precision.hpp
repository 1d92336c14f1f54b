#pragma once

#include <string_view>
#include <type_traits>

namespace mpbjac {

/// Floating-point formats handled by the toolkit. F64 is the working
/// precision, F32 the low precision used inside mixed preconditioners.
enum class Precision { F64, F32 };

template <class T>
concept Scalar = std::is_same_v<T, double> || std::is_same_v<T, float>;

template <Scalar T>
inline constexpr Precision precision_of = std::is_same_v<T, double> ? Precision::F64 : Precision::F32;

constexpr std::string_view to_string(Precision p) noexcept {
  return p == Precision::F64 ? "f64" : "f32";
}

/// Accepts "f64"/"fp64"/"double" and "f32"/"fp32"/"float". Returns false otherwise.
constexpr bool parse_precision(std::string_view s, Precision& out) noexcept {
  if (s == "f64" || s == "fp64" || s == "double") {
    out = Precision::F64;
    return true;
  }
  if (s == "f32" || s == "fp32" || s == "float") {
    out = Precision::F32;
    return true;
  }
  return false;
}

/// Number of significand bits; used to order formats by width.
constexpr int mantissa_bits(Precision p) noexcept { return p == Precision::F64 ? 53 : 24; }

}  // namespace mpbjac
