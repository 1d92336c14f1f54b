#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mpbjac/csr_matrix.hpp"

namespace mpbjac {

/// Uniform grid of n interior points per axis on the unit cube, h = 1/(n+1).
struct GridSpec {
  int n = 1;

  double h() const noexcept { return 1.0 / (n + 1); }
  /// 1/h^2 computed exactly as (n+1)^2.
  double inv_h2() const noexcept { return static_cast<double>(n + 1) * static_cast<double>(n + 1); }
  std::size_t unknowns() const noexcept { return static_cast<std::size_t>(n) * n * n; }
  std::size_t expected_nnz() const noexcept {
    const auto m = static_cast<std::size_t>(n);
    return 7 * m * m * m - 6 * m * m;
  }
  /// Row index of node (i, j, k); x varies fastest.
  std::size_t node(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * (j + static_cast<std::size_t>(n) * k);
  }
};

enum class CoefficientKind { Const, Ani, Dis, Rand };

/// Diffusion coefficient family. `strength` is the family parameter s.
struct CoefficientField {
  CoefficientKind kind = CoefficientKind::Const;
  double strength = 1.0;
  std::uint64_t seed = 0;

  static CoefficientField constant() { return {}; }
  static CoefficientField anisotropic(double s) { return {CoefficientKind::Ani, s, 0}; }
  static CoefficientField discontinuous(double s) { return {CoefficientKind::Dis, s, 0}; }
  static CoefficientField random(double s, std::uint64_t seed) { return {CoefficientKind::Rand, s, seed}; }

  /// Multipliers applied to face coefficients along x, y and z.
  double axis_weight(int axis) const noexcept {
    return kind == CoefficientKind::Ani && axis > 0 ? strength : 1.0;
  }
};

std::string to_string(CoefficientKind k);
/// Accepts const, ani, dis, rand. Throws InvalidArgument otherwise.
CoefficientKind parse_coefficient_kind(const std::string& s);

enum class RhsKind { Ones, Random };

std::string to_string(RhsKind k);
RhsKind parse_rhs_kind(const std::string& s);

/// SplitMix64 generator producing doubles in [0, 1) from the top 53 bits.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double next_unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// First `count` uniform draws of the stream for `seed`.
std::vector<double> rand_stream(std::uint64_t seed, std::size_t count);

/// Nodal coefficient values, one per grid node in row order.
std::vector<double> nodal_coefficients(const GridSpec& grid, const CoefficientField& field);

/// Harmonic mean of two nodal values, times the axis weight. Equal inputs
/// return that value unchanged.
double face_coefficient(const CoefficientField& field, int axis, double kappa_a, double kappa_b);

struct DiscreteSystem {
  CsrMatrix<double> matrix;
  std::vector<double> rhs;
  GridSpec grid;
  CoefficientField field;
  RhsKind rhs_kind = RhsKind::Ones;
  std::uint64_t rhs_seed = 0;
};

/// 7-point finite differences for -div(kappa grad u) = f with u = 0 on the boundary.
DiscreteSystem build_diffusion_system(const GridSpec& grid, const CoefficientField& field,
                                      RhsKind rhs_kind = RhsKind::Ones, std::uint64_t rhs_seed = 0);

/// a_ii += p_diag * sum_j |a_ij| (the sum includes the diagonal itself).
CsrMatrix<double> diag_augment(const CsrMatrix<double>& a, double p_diag);

/// Problem description stored next to a generated matrix.
struct SystemMetadata {
  int n = 0;
  CoefficientField field;
  RhsKind rhs_kind = RhsKind::Ones;
  std::uint64_t rhs_seed = 0;
  double p_diag = 0.0;
  std::size_t rows = 0;
  std::size_t nnz = 0;
};

void write_metadata(const SystemMetadata& meta, const std::filesystem::path& path);
SystemMetadata read_metadata(const std::filesystem::path& path);

void write_vector(const std::vector<double>& v, const std::filesystem::path& path);
std::vector<double> read_vector(const std::filesystem::path& path);

}  // namespace mpbjac
