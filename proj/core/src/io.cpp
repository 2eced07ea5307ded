#include "csmc/io.hpp"

#include "csmc/errors.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace csmc::io {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_nan_token(std::string_view s) { return s == "nan" || s == "NaN" || s == "NAN"; }

double parse_double(std::string_view s, std::size_t line) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(fmt::format("cannot parse number '{}'", s), line);
  }
  return v;
}

long long parse_int(std::string_view s, std::size_t line) {
  s = trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(fmt::format("cannot parse integer '{}'", s), line);
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) {
      ++i;
    }
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') {
      ++j;
    }
    if (j > i) {
      out.push_back(s.substr(i, j - i));
    }
    i = j;
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

}  // namespace

std::string format_double(double v) { return fmt::format("{}", v); }

MaskedMatrix read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::vector<Entry> observed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') {
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      auto cell = trim(view.substr(start, comma == std::string_view::npos ? view.npos : comma - start));
      const auto i = static_cast<Index>(rows.size());
      const auto j = static_cast<Index>(row.size());
      if (is_nan_token(cell)) {
        row.push_back(0.0);
      } else {
        const double v = parse_double(cell, line_no);
        if (!std::isfinite(v)) {
          throw ParseError("infinite value in matrix file", line_no);
        }
        row.push_back(v);
        observed.push_back({i, j});
      }
      if (comma == std::string_view::npos) {
        break;
      }
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(fmt::format("expected {} columns, found {}", rows.front().size(), row.size()), line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ParseError("empty matrix file", 0);
  }
  Matrix values(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  ObservationSet mask(values.rows(), values.cols(), std::move(observed));
  return MaskedMatrix(values, std::move(mask));
}

MaskedMatrix read_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const MaskedMatrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) {
        out << ',';
      }
      out << (m.mask().contains(i, j) ? format_double(m.values()(i, j)) : std::string("nan"));
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const MaskedMatrix& m) {
  auto out = open_out(path);
  write_csv(out, m);
}

void write_csv(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) {
        out << ',';
      }
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path);
  write_csv(out, m);
}

MaskedMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError("empty MatrixMarket file", 0);
  }
  ++line_no;
  {
    std::string lower = line;
    for (auto& c : lower) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    auto tokens = split_ws(lower);
    if (tokens.size() < 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" || tokens[2] != "coordinate") {
      throw ParseError("expected '%%MatrixMarket matrix coordinate' header", line_no);
    }
    if (tokens[3] != "real" && tokens[3] != "integer") {
      throw ParseError(fmt::format("unsupported MatrixMarket field '{}'", tokens[3]), line_no);
    }
    if (tokens[4] != "general") {
      throw ParseError(fmt::format("unsupported MatrixMarket symmetry '{}'", tokens[4]), line_no);
    }
  }
  long long n1 = -1;
  long long n2 = -1;
  long long nnz = -1;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = trim(line);
    if (view.empty() || view.front() == '%') {
      continue;
    }
    auto tokens = split_ws(view);
    if (tokens.size() != 3) {
      throw ParseError("expected 'rows cols entries' size line", line_no);
    }
    n1 = parse_int(tokens[0], line_no);
    n2 = parse_int(tokens[1], line_no);
    nnz = parse_int(tokens[2], line_no);
    break;
  }
  if (n1 <= 0 || n2 <= 0 || nnz < 0) {
    throw ParseError("missing or invalid size line", line_no);
  }
  Matrix values = Matrix::Zero(n1, n2);
  std::vector<Entry> observed;
  observed.reserve(static_cast<std::size_t>(nnz));
  while (std::getline(in, line)) {
    ++line_no;
    auto view = trim(line);
    if (view.empty() || view.front() == '%') {
      continue;
    }
    auto tokens = split_ws(view);
    if (tokens.size() != 3) {
      throw ParseError("expected 'i j value' triplet", line_no);
    }
    const long long i = parse_int(tokens[0], line_no);
    const long long j = parse_int(tokens[1], line_no);
    const double v = parse_double(tokens[2], line_no);
    if (i < 1 || i > n1 || j < 1 || j > n2) {
      throw ParseError(fmt::format("index ({}, {}) outside {}x{}", i, j, n1, n2), line_no);
    }
    if (!std::isfinite(v)) {
      throw ParseError("non-finite value", line_no);
    }
    values(i - 1, j - 1) = v;
    observed.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1)});
  }
  if (static_cast<long long>(observed.size()) != nnz) {
    throw ParseError(fmt::format("header announces {} entries, found {}", nnz, observed.size()), line_no);
  }
  ObservationSet mask(n1, n2, std::move(observed));
  return MaskedMatrix(values, std::move(mask));
}

MaskedMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const MaskedMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.mask().size() << '\n';
  for (const auto& e : m.mask().entries()) {
    out << e.row + 1 << ' ' << e.col + 1 << ' ' << format_double(m.values()(e.row, e.col)) << '\n';
  }
}

void write_matrix_market(const std::filesystem::path& path, const MaskedMatrix& m) {
  auto out = open_out(path);
  write_matrix_market(out, m);
}

MaskedMatrix read_matrix(const std::filesystem::path& path) {
  return path.extension() == ".mtx" ? read_matrix_market(path) : read_csv(path);
}

void write_matrix(const std::filesystem::path& path, const MaskedMatrix& m) {
  if (path.extension() == ".mtx") {
    write_matrix_market(path, m);
  } else {
    write_csv(path, m);
  }
}

}  // namespace csmc::io
