#include "csmc/datasets.hpp"

#include "csmc/errors.hpp"

#include <fmt/format.h>
#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

namespace csmc {
namespace {

constexpr std::array<unsigned char, 8> png_signature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Matrix from_pixels(const std::vector<unsigned char>& pixels, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = static_cast<double>(pixels[static_cast<std::size_t>(i * cols + j)]) / 255.0;
    }
  }
  return m;
}

Matrix decode_png(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
  // IHDR is always the first chunk: 8-byte signature, 8-byte chunk header,
  // width, height, then bit depth (offset 24) and colour type (offset 25).
  if (bytes.size() < 26) {
    throw FormatError(path.string() + ": truncated PNG");
  }
  const int bit_depth = bytes[24];
  const int colour_type = bytes[25];
  if (colour_type != 0) {
    throw FormatError(fmt::format("{}: PNG colour type {} is not plain grayscale", path.string(), colour_type));
  }
  if (bit_depth != 8) {
    throw FormatError(fmt::format("{}: PNG bit depth {} is not 8", path.string(), bit_depth));
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError(fmt::format("{}: {}", path.string(), image.message));
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<unsigned char> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw FormatError(fmt::format("{}: {}", path.string(), msg));
  }
  return from_pixels(pixels, static_cast<Index>(image.height), static_cast<Index>(image.width));
}

Matrix decode_pgm(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
  const bool binary = bytes[1] == '5';
  std::size_t pos = 2;
  auto next_token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') {
      tok.push_back(static_cast<char>(bytes[pos++]));
    }
    if (tok.empty()) {
      throw FormatError(path.string() + ": truncated PGM header");
    }
    return std::stol(tok);
  };
  const long width = next_token();
  const long height = next_token();
  const long maxval = next_token();
  if (width <= 0 || height <= 0) {
    throw FormatError(path.string() + ": invalid PGM size");
  }
  if (maxval != 255) {
    throw FormatError(fmt::format("{}: PGM maxval {} is not 8-bit (255)", path.string(), maxval));
  }
  const auto count = static_cast<std::size_t>(width * height);
  std::vector<unsigned char> pixels(count);
  if (binary) {
    ++pos;  // single whitespace byte after maxval
    if (bytes.size() < pos + count) {
      throw FormatError(path.string() + ": truncated PGM pixel data");
    }
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), count, pixels.begin());
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      const long v = next_token();
      if (v < 0 || v > 255) {
        throw FormatError(path.string() + ": PGM sample out of range");
      }
      pixels[k] = static_cast<unsigned char>(v);
    }
  }
  return from_pixels(pixels, height, width);
}

std::vector<unsigned char> to_pixels(const Matrix& image) {
  if (!image.allFinite()) {
    throw DomainError("cannot save an image with non-finite values");
  }
  std::vector<unsigned char> pixels(static_cast<std::size_t>(image.size()));
  for (Index i = 0; i < image.rows(); ++i) {
    for (Index j = 0; j < image.cols(); ++j) {
      const double v = std::clamp(image(i, j), 0.0, 1.0);
      pixels[static_cast<std::size_t>(i * image.cols() + j)] = static_cast<unsigned char>(std::floor(v * 255.0 + 0.5));
    }
  }
  return pixels;
}

}  // namespace

Matrix load_image_gray(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() >= png_signature.size() && std::equal(png_signature.begin(), png_signature.end(), bytes.begin())) {
    return decode_png(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '2')) {
    return decode_pgm(bytes, path);
  }
  throw FormatError(path.string() + ": not an 8-bit grayscale PNG or PGM image");
}

void save_image_gray(const Matrix& image, const std::filesystem::path& path) {
  const auto pixels = to_pixels(image);
  if (path.extension() == ".pgm") {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write " + path.string());
    }
    out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    return;
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.cols());
  png.height = static_cast<png_uint_32>(image.rows());
  png.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    throw std::runtime_error(fmt::format("cannot write {}: {}", path.string(), png.message));
  }
}

}  // namespace csmc
