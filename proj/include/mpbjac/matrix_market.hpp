#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "mpbjac/csr_matrix.hpp"

namespace mpbjac {

/// Parses "%%MatrixMarket matrix coordinate real general|symmetric" text.
/// Symmetric files are expanded to full storage, duplicate entries summed.
/// Throws FormatError on malformed input.
CsrMatrix<double> parse_matrix_market(std::string_view text);

/// Throws IoError if the file cannot be read.
CsrMatrix<double> mm_read(const std::filesystem::path& path);

/// Writes "coordinate real general" with 1-based indices. Values use the
/// shortest decimal form that reads back to the same binary value.
template <Scalar T>
void write_matrix_market(std::ostream& os, const CsrMatrix<T>& a);

template <Scalar T>
void mm_write(const CsrMatrix<T>& a, const std::filesystem::path& path);

}  // namespace mpbjac
