#pragma once

#include "csmc/matrix.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace csmc::io {

// Dense CSV: one matrix row per line, comma separated, the literal `nan`
// marks an unobserved cell. Values are written with 17 significant digits so
// finite entries round-trip exactly.
MaskedMatrix read_csv(std::istream& in);
MaskedMatrix read_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const MaskedMatrix& m);
void write_csv(const std::filesystem::path& path, const MaskedMatrix& m);

// Fully observed dense matrix, e.g. a completion result.
void write_csv(std::ostream& out, const Matrix& m);
void write_csv(const std::filesystem::path& path, const Matrix& m);

// MatrixMarket `coordinate real general`: one 1-based (i, j, value) triplet
// per observed entry.
MaskedMatrix read_matrix_market(std::istream& in);
MaskedMatrix read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(std::ostream& out, const MaskedMatrix& m);
void write_matrix_market(const std::filesystem::path& path, const MaskedMatrix& m);

/// Dispatch on extension: `.mtx` is MatrixMarket, anything else CSV.
MaskedMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const MaskedMatrix& m);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace csmc::io
