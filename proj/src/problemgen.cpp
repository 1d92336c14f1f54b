#include "mpbjac/problemgen.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mpbjac/error.hpp"

namespace mpbjac {

std::string to_string(CoefficientKind k) {
  switch (k) {
    case CoefficientKind::Const: return "const";
    case CoefficientKind::Ani: return "ani";
    case CoefficientKind::Dis: return "dis";
    case CoefficientKind::Rand: return "rand";
  }
  return "?";
}

CoefficientKind parse_coefficient_kind(const std::string& s) {
  if (s == "const") return CoefficientKind::Const;
  if (s == "ani") return CoefficientKind::Ani;
  if (s == "dis") return CoefficientKind::Dis;
  if (s == "rand") return CoefficientKind::Rand;
  throw InvalidArgument("unknown coefficient family '" + s + "' (expected const, ani, dis or rand)");
}

std::string to_string(RhsKind k) { return k == RhsKind::Ones ? "ones" : "random"; }

RhsKind parse_rhs_kind(const std::string& s) {
  if (s == "ones") return RhsKind::Ones;
  if (s == "random") return RhsKind::Random;
  throw InvalidArgument("unknown rhs kind '" + s + "' (expected ones or random)");
}

std::vector<double> rand_stream(std::uint64_t seed, std::size_t count) {
  SplitMix64 rng(seed);
  std::vector<double> out(count);
  for (auto& v : out) v = rng.next_unit();
  return out;
}

namespace {

void validate(const GridSpec& grid, const CoefficientField& field) {
  if (grid.n < 1) throw InvalidArgument("grid size n must be at least 1");
  if (!(field.strength > 0.0) || !std::isfinite(field.strength))
    throw InvalidArgument("coefficient strength s must be positive and finite");
  // 7n^3 entries must fit the column index type.
  if (grid.n > 1000) throw InvalidArgument("grid size n too large");
}

// Closed interval [0.25, 0.75] on the node coordinate (i+1)h, evaluated in integers.
bool in_inclusion(int i, int n) { return 4 * (i + 1) >= n + 1 && 4 * (i + 1) <= 3 * (n + 1); }

}  // namespace

std::vector<double> nodal_coefficients(const GridSpec& grid, const CoefficientField& field) {
  validate(grid, field);
  const int n = grid.n;
  std::vector<double> kappa(grid.unknowns(), 1.0);
  switch (field.kind) {
    case CoefficientKind::Const:
    case CoefficientKind::Ani:
      break;
    case CoefficientKind::Dis:
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i)
            if (in_inclusion(i, n) && in_inclusion(j, n) && in_inclusion(k, n)) kappa[grid.node(i, j, k)] = field.strength;
      break;
    case CoefficientKind::Rand: {
      SplitMix64 rng(field.seed);
      for (auto& v : kappa) v = std::pow(field.strength, rng.next_unit());
      break;
    }
  }
  return kappa;
}

double face_coefficient(const CoefficientField& field, int axis, double kappa_a, double kappa_b) {
  if (!(kappa_a > 0.0) || !(kappa_b > 0.0)) throw InvalidArgument("diffusion coefficient must be positive");
  const double w = field.axis_weight(axis);
  if (kappa_a == kappa_b) return kappa_a * w;
  // 2 * (a*b) / (a+b) is symmetric in a and b bit for bit.
  return 2.0 * (kappa_a * kappa_b) / (kappa_a + kappa_b) * w;
}

DiscreteSystem build_diffusion_system(const GridSpec& grid, const CoefficientField& field, RhsKind rhs_kind,
                                      std::uint64_t rhs_seed) {
  validate(grid, field);
  const int n = grid.n;
  const std::size_t rows = grid.unknowns();
  const double inv_h2 = grid.inv_h2();
  const std::vector<double> kappa = nodal_coefficients(grid, field);

  std::vector<offset_t> row_ptr(rows + 1, 0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int count = 1 + (i > 0) + (i < n - 1) + (j > 0) + (j < n - 1) + (k > 0) + (k < n - 1);
        const std::size_t row = grid.node(i, j, k);
        row_ptr[row + 1] = row_ptr[row] + count;
      }

  const auto nnz = static_cast<std::size_t>(row_ptr.back());
  std::vector<index_t> col_idx(nnz);
  std::vector<double> values(nnz);

  const std::ptrdiff_t stride_y = n;
  const std::ptrdiff_t stride_z = static_cast<std::ptrdiff_t>(n) * n;

  // Rows are independent; kappa is fully materialized before this loop.
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const std::size_t row = grid.node(i, j, k);
        const double kc = kappa[row];

        // Neighbours in ascending column order: z-, y-, x-, (diag), x+, y+, z+.
        struct Face {
          bool interior;
          std::ptrdiff_t offset;
          int axis;
        };
        const Face faces[6] = {
            {k > 0, -stride_z, 2}, {j > 0, -stride_y, 1}, {i > 0, -1, 0},
            {i < n - 1, 1, 0},     {j < n - 1, stride_y, 1}, {k < n - 1, stride_z, 2},
        };

        double scaled[6];
        for (int f = 0; f < 6; ++f) {
          const double kn = faces[f].interior ? kappa[static_cast<std::ptrdiff_t>(row) + faces[f].offset] : kc;
          scaled[f] = face_coefficient(field, faces[f].axis, kc, kn) * inv_h2;
        }
        double diag = 0.0;
        for (double s : scaled) diag += s;

        offset_t p = row_ptr[row];
        for (int f = 0; f < 3; ++f) {
          if (!faces[f].interior) continue;
          col_idx[p] = static_cast<index_t>(static_cast<std::ptrdiff_t>(row) + faces[f].offset);
          values[p++] = -scaled[f];
        }
        col_idx[p] = static_cast<index_t>(row);
        values[p++] = diag;
        for (int f = 3; f < 6; ++f) {
          if (!faces[f].interior) continue;
          col_idx[p] = static_cast<index_t>(static_cast<std::ptrdiff_t>(row) + faces[f].offset);
          values[p++] = -scaled[f];
        }
      }
    }
  }

  DiscreteSystem sys{CsrMatrix<double>(rows, rows, std::move(row_ptr), std::move(col_idx), std::move(values)),
                     {},
                     grid,
                     field,
                     rhs_kind,
                     rhs_seed};
  sys.rhs = rhs_kind == RhsKind::Ones ? std::vector<double>(rows, 1.0) : rand_stream(rhs_seed, rows);
  return sys;
}

CsrMatrix<double> diag_augment(const CsrMatrix<double>& a, double p_diag) {
  if (!(p_diag >= 0.0) || !std::isfinite(p_diag)) throw InvalidArgument("P_diag must be finite and non-negative");
  if (!a.square()) throw DimensionMismatch("diag_augment requires a square matrix");
  std::vector<double> values(a.values().begin(), a.values().end());
  const auto rp = a.row_ptr();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto d = a.find(i, i);
    if (!d) throw MissingDiagonal(i);
    double abs_sum = 0.0;
    for (offset_t p = rp[i]; p < rp[i + 1]; ++p) abs_sum += std::abs(values[p]);
    values[*d] += p_diag * abs_sum;
  }
  return CsrMatrix<double>(a.pattern(), std::move(values));
}

void write_metadata(const SystemMetadata& meta, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["grid_n"] = meta.n;
  j["family"] = to_string(meta.field.kind);
  j["s"] = meta.field.strength;
  j["seed"] = meta.field.seed;
  j["rhs_kind"] = to_string(meta.rhs_kind);
  j["rhs_seed"] = meta.rhs_seed;
  j["p_diag"] = meta.p_diag;
  j["rows"] = meta.rows;
  j["nnz"] = meta.nnz;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("error writing " + path.string());
}

SystemMetadata read_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    SystemMetadata m;
    m.n = j.at("grid_n").get<int>();
    m.field.kind = parse_coefficient_kind(j.at("family").get<std::string>());
    m.field.strength = j.at("s").get<double>();
    m.field.seed = j.at("seed").get<std::uint64_t>();
    m.rhs_kind = parse_rhs_kind(j.at("rhs_kind").get<std::string>());
    m.rhs_seed = j.at("rhs_seed").get<std::uint64_t>();
    m.p_diag = j.at("p_diag").get<double>();
    m.rows = j.at("rows").get<std::size_t>();
    m.nnz = j.at("nnz").get<std::size_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_vector(const std::vector<double>& v, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "%%MatrixMarket matrix array real general\n" << v.size() << " 1\n";
  char buf[32];
  for (double x : v) {
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    *r.ptr++ = '\n';
    out.write(buf, r.ptr - buf);
  }
  if (!out) throw IoError("error writing " + path.string());
}

std::vector<double> read_vector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("%%MatrixMarket matrix array real", 0) != 0) throw FormatError(path.string() + ": not an array file");
  do {
    if (!std::getline(in, line)) throw FormatError(path.string() + ": missing size line");
  } while (!line.empty() && line[0] == '%');
  std::istringstream sz(line);
  std::size_t rows = 0, cols = 0;
  if (!(sz >> rows >> cols) || cols != 1) throw FormatError(path.string() + ": expected an N x 1 array");
  std::vector<double> v(rows);
  for (auto& x : v) {
    std::string tok;
    if (!(in >> tok)) throw FormatError(path.string() + ": too few values");
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) throw FormatError(path.string() + ": bad value " + tok);
  }
  return v;
}

}  // namespace mpbjac
