#pragma once

#include "csmc/matrix.hpp"
#include "csmc/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace csmc {

/// Random rank-r test matrix (A + N_A)(B + N_B) with Gaussian factors and
/// sparse Gaussian factor noise.
struct SyntheticSpec {
  Index n1 = 300;
  Index n2 = 1000;
  Index rank = 5;
  double noise_density = 0.3;  // fraction of non-zero entries in N_A and N_B
  double noise_scale = 1.0;
  std::uint64_t seed = 0;
};

Matrix gen_synthetic(const SyntheticSpec& spec);

/// How user_frac and item_frac are applied after ranking by rating count.
enum class FrequencyCut {
  /// Keep the most active users/items until they account for the given share
  /// of the remaining ratings.
  rating_share,
  /// Keep the given share of distinct users/items.
  entity_share,
};

struct MovieLensOptions {
  double user_frac = 0.6;
  double item_frac = 0.5;
  RatingScale scale{0.5, 5.0};
  FrequencyCut cut = FrequencyCut::rating_share;
};

struct LoadStats {
  std::size_t rows_read = 0;
  std::size_t users_total = 0;
  std::size_t items_total = 0;
  std::size_t ratings_after_user_cut = 0;
  std::size_t ratings_kept = 0;
};

struct RatingsMatrix {
  MaskedMatrix ratings;
  std::vector<std::int64_t> user_ids;  // row i -> original userId
  std::vector<std::int64_t> item_ids;  // column j -> original movieId
  RatingScale scale;
  LoadStats stats;
};

/// Reads a `userId,movieId,rating,timestamp` CSV, keeps the most active
/// users, then the most rated movies among them. Ties in rating count are
/// broken by ascending id.
RatingsMatrix load_movielens(std::istream& in, const MovieLensOptions& options = {});
RatingsMatrix load_movielens(const std::filesystem::path& path, const MovieLensOptions& options = {});

/// 8-bit grayscale image as values p / 255. Accepts PNG and PGM (P2 or P5).
Matrix load_image_gray(const std::filesystem::path& path);

/// Clamps to [0, 1], scales by 255 and rounds half up. `.pgm` writes binary
/// PGM, anything else PNG.
void save_image_gray(const Matrix& image, const std::filesystem::path& path);

}  // namespace csmc
