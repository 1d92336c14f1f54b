#include "mpbjac/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mpbjac/error.hpp"

namespace mpbjac {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

// Cursor over the entry section; tokens are separated by arbitrary whitespace.
class Tokens {
 public:
  Tokens(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  std::string_view next() {
    skip();
    if (pos_ >= text_.size()) throw FormatError("unexpected end of file after line " + std::to_string(line_));
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::size_t line() const noexcept { return line_; }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

template <class V>
V parse_number(std::string_view tok, std::size_t line) {
  V v{};
  // from_chars rejects a leading '+', which some writers emit.
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw FormatError("line " + std::to_string(line) + ": cannot parse '" + std::string(tok) + "'");
  return v;
}

}  // namespace

CsrMatrix<double> parse_matrix_market(std::string_view text) {
  const std::size_t eol = text.find('\n');
  const std::string_view header_line = text.substr(0, eol);
  const auto header = split_ws(header_line);
  if (header.size() != 5 || lower(header[0]) != "%%matrixmarket")
    throw FormatError("missing %%MatrixMarket header");
  if (lower(header[1]) != "matrix") throw FormatError("unsupported object '" + std::string(header[1]) + "'");
  if (lower(header[2]) != "coordinate") throw FormatError("only coordinate format is supported");
  if (lower(header[3]) != "real") throw FormatError("field must be real, got '" + std::string(header[3]) + "'");
  const std::string symmetry = lower(header[4]);
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    throw FormatError("symmetry must be general or symmetric, got '" + std::string(header[4]) + "'");

  Tokens tok(eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1), 2);
  const auto rows = parse_number<std::size_t>(tok.next(), tok.line());
  const auto cols = parse_number<std::size_t>(tok.next(), tok.line());
  const auto count = parse_number<std::size_t>(tok.next(), tok.line());
  if (symmetric && rows != cols) throw FormatError("symmetric matrix must be square");

  std::vector<Triplet> entries;
  entries.reserve(symmetric ? 2 * count : count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto i = parse_number<std::size_t>(tok.next(), tok.line());
    const auto j = parse_number<std::size_t>(tok.next(), tok.line());
    const auto v = parse_number<double>(tok.next(), tok.line());
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw FormatError("line " + std::to_string(tok.line()) + ": index (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") out of bounds");
    entries.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
  }
  return csr_from_triplets(rows, cols, std::move(entries));
}

CsrMatrix<double> mm_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return parse_matrix_market(ss.str());
}

template <Scalar T>
void write_matrix_market(std::ostream& os, const CsrMatrix<T>& a) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';

  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto av = a.values();
  std::string buf;
  buf.reserve(1 << 20);
  char num[32];
  auto put = [&](auto v, char sep) {
    const auto r = std::to_chars(num, num + sizeof num, v);
    buf.append(num, r.ptr);
    buf.push_back(sep);
  };
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (offset_t p = rp[i]; p < rp[i + 1]; ++p) {
      put(i + 1, ' ');
      put(static_cast<std::size_t>(ci[p]) + 1, ' ');
      put(av[p], '\n');
    }
    if (buf.size() > (1 << 20) - 128) {
      os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

template <Scalar T>
void mm_write(const CsrMatrix<T>& a, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_matrix_market(out, a);
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

template void write_matrix_market(std::ostream&, const CsrMatrix<double>&);
template void write_matrix_market(std::ostream&, const CsrMatrix<float>&);
template void mm_write(const CsrMatrix<double>&, const std::filesystem::path&);
template void mm_write(const CsrMatrix<float>&, const std::filesystem::path&);

}  // namespace mpbjac
