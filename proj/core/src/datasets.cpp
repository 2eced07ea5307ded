#include "csmc/datasets.hpp"

#include "csmc/errors.hpp"
#include "csmc/sampling.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <string_view>
#include <unordered_map>

namespace csmc {
namespace {

void add_sparse_noise(Matrix& target, double density, double scale, Rng& rng) {
  if (density <= 0.0) {
    return;
  }
  const auto total = static_cast<std::size_t>(target.size());
  const auto k = static_cast<std::size_t>(
      std::clamp<std::int64_t>(round_half_even(density * static_cast<double>(total)), 0,
                               static_cast<std::int64_t>(total)));
  std::vector<std::size_t> pool(total);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(total - i));
    std::swap(pool[i], pool[j]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    target.data()[pool[i]] += scale * rng.normal();
  }
}

struct RatingRow {
  std::int64_t user = 0;
  std::int64_t item = 0;
  double rating = 0.0;
};

std::string_view next_field(std::string_view& rest) {
  const auto comma = rest.find(',');
  std::string_view field = rest.substr(0, comma);
  rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
  while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.remove_suffix(1);
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  return field;
}

template <typename T>
T parse_field(std::string_view field, std::size_t line, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(fmt::format("malformed {} '{}'", what, field), line);
  }
  return value;
}

// Ids ordered by count descending, ties by ascending id; returns the kept ids.
std::vector<std::int64_t> top_by_count(const std::map<std::int64_t, std::size_t>& counts, double frac,
                                       FrequencyCut cut) {
  std::vector<std::pair<std::int64_t, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::size_t keep = 0;
  if (cut == FrequencyCut::entity_share) {
    keep = static_cast<std::size_t>(std::max<std::int64_t>(1, round_half_even(frac * static_cast<double>(ranked.size()))));
  } else {
    std::size_t total = 0;
    for (const auto& [id, c] : ranked) total += c;
    const double target = frac * static_cast<double>(total);
    std::size_t running = 0;
    while (keep < ranked.size() && static_cast<double>(running) < target) {
      running += ranked[keep].second;
      ++keep;
    }
    keep = std::max<std::size_t>(keep, 1);
  }
  keep = std::min(keep, ranked.size());
  std::vector<std::int64_t> ids;
  ids.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) ids.push_back(ranked[i].first);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

Matrix gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n1 < 1 || spec.n2 < 1 || spec.rank < 1) {
    throw DomainError("synthetic matrix dimensions and rank must be positive");
  }
  if (spec.rank > std::min(spec.n1, spec.n2)) {
    throw DomainError(fmt::format("rank {} exceeds min({}, {})", spec.rank, spec.n1, spec.n2));
  }
  if (!(spec.noise_density >= 0.0 && spec.noise_density <= 1.0)) {
    throw DomainError("noise density must lie in [0, 1]");
  }
  Rng rng(spec.seed);
  Matrix a(spec.n1, spec.rank);
  Matrix b(spec.rank, spec.n2);
  for (Index t = 0; t < a.size(); ++t) a.data()[t] = rng.normal();
  for (Index t = 0; t < b.size(); ++t) b.data()[t] = rng.normal();
  add_sparse_noise(a, spec.noise_density, spec.noise_scale, rng);
  add_sparse_noise(b, spec.noise_density, spec.noise_scale, rng);
  return a * b;
}

RatingsMatrix load_movielens(std::istream& in, const MovieLensOptions& options) {
  if (!(options.user_frac > 0.0 && options.user_frac <= 1.0) || !(options.item_frac > 0.0 && options.item_frac <= 1.0)) {
    throw DomainError("user and item fractions must lie in (0, 1]");
  }
  if (!(options.scale.max > options.scale.min)) {
    throw DomainError("rating scale is empty");
  }
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError("empty ratings file", 0);
  }
  ++line_no;
  {
    std::string_view header = line;
    while (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    if (header.substr(0, 23) != "userId,movieId,rating,t") {
      throw ParseError("expected header userId,movieId,rating,timestamp", line_no);
    }
  }
  std::vector<RatingRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = line;
    if (rest.empty() || rest == "\r") {
      continue;
    }
    RatingRow r;
    r.user = parse_field<std::int64_t>(next_field(rest), line_no, "userId");
    r.item = parse_field<std::int64_t>(next_field(rest), line_no, "movieId");
    r.rating = parse_field<double>(next_field(rest), line_no, "rating");
    if (!std::isfinite(r.rating) || r.rating < options.scale.min || r.rating > options.scale.max) {
      throw ParseError(fmt::format("rating {} outside scale [{}, {}]", r.rating, options.scale.min, options.scale.max),
                       line_no);
    }
    rows.push_back(r);
  }

  RatingsMatrix out;
  out.scale = options.scale;
  out.stats.rows_read = rows.size();

  std::map<std::int64_t, std::size_t> user_counts;
  std::map<std::int64_t, std::size_t> all_items;
  for (const auto& r : rows) {
    ++user_counts[r.user];
    ++all_items[r.item];
  }
  out.stats.users_total = user_counts.size();
  out.stats.items_total = all_items.size();
  if (rows.empty()) {
    throw DomainError("ratings file contains no ratings");
  }
  const auto users = top_by_count(user_counts, options.user_frac, options.cut);

  std::map<std::int64_t, std::size_t> item_counts;
  std::vector<RatingRow> kept_user_rows;
  for (const auto& r : rows) {
    if (std::binary_search(users.begin(), users.end(), r.user)) {
      ++item_counts[r.item];
      kept_user_rows.push_back(r);
    }
  }
  out.stats.ratings_after_user_cut = kept_user_rows.size();
  const auto items = top_by_count(item_counts, options.item_frac, options.cut);

  std::unordered_map<std::int64_t, Index> user_row;
  std::unordered_map<std::int64_t, Index> item_col;
  for (std::size_t i = 0; i < users.size(); ++i) user_row[users[i]] = static_cast<Index>(i);
  for (std::size_t j = 0; j < items.size(); ++j) item_col[items[j]] = static_cast<Index>(j);

  Matrix values = Matrix::Zero(static_cast<Index>(users.size()), static_cast<Index>(items.size()));
  std::vector<Entry> observed;
  for (const auto& r : kept_user_rows) {
    auto col = item_col.find(r.item);
    if (col == item_col.end()) {
      continue;
    }
    const Index i = user_row.at(r.user);
    values(i, col->second) = r.rating;
    observed.push_back({i, col->second});
  }
  if (observed.empty()) {
    throw DomainError("no ratings survive the user and item filters");
  }
  out.stats.ratings_kept = observed.size();
  ObservationSet mask(values.rows(), values.cols(), std::move(observed));
  out.ratings = MaskedMatrix(values, std::move(mask));
  out.user_ids = users;
  out.item_ids = items;
  return out;
}

RatingsMatrix load_movielens(const std::filesystem::path& path, const MovieLensOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return load_movielens(in, options);
}

}  // namespace csmc
