#include "csmc/sampling.hpp"

#include "csmc/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <limits>
#include <numeric>

namespace csmc {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// First k entries of `pool` become a uniform k-subset in random order.
template <typename T>
void partial_shuffle(std::vector<T>& pool, std::size_t k, Rng& rng) {
  const std::size_t n = pool.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(pool[i], pool[j]);
  }
}

}  // namespace

Rng Rng::derive(std::uint64_t stream) const { return Rng(splitmix64(seed_ ^ splitmix64(stream))); }

std::uint64_t Rng::uniform_index(std::uint64_t bound) {
  if (bound == 0) {
    throw DomainError("uniform_index bound must be positive");
  }
  // reject the low (2^64 mod bound) values so every residue is equally likely
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t x = engine_();
    if (x >= threshold) {
      return x % bound;
    }
  }
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

std::int64_t round_half_even(double x) {
  const int previous = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double r = std::nearbyint(x);
  std::fesetround(previous);
  return static_cast<std::int64_t>(r);
}

Index selected_column_count(Index n2, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError(fmt::format("column ratio alpha must lie in (0, 1], got {}", alpha));
  }
  if (n2 < 1) {
    throw DomainError("matrix must have at least one column");
  }
  const auto d = round_half_even(alpha * static_cast<double>(n2));
  return std::clamp<Index>(static_cast<Index>(d), 1, n2);
}

ColumnSelection sample_columns(Index n2, double alpha, Rng& rng) {
  const Index d = selected_column_count(n2, alpha);
  std::vector<Index> pool(static_cast<std::size_t>(n2));
  std::iota(pool.begin(), pool.end(), Index{0});
  partial_shuffle(pool, static_cast<std::size_t>(d), rng);
  pool.resize(static_cast<std::size_t>(d));
  std::sort(pool.begin(), pool.end());
  return {std::move(pool), alpha, rng.seed()};
}

ObservationSet sample_mask(Index n1, Index n2, double rho, Rng& rng) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw DomainError(fmt::format("observation density rho must lie in (0, 1], got {}", rho));
  }
  if (n1 < 1 || n2 < 1) {
    throw DomainError("mask shape must be positive");
  }
  const auto total = static_cast<std::uint64_t>(n1) * static_cast<std::uint64_t>(n2);
  if (total > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("mask larger than 2^32 cells");
  }
  const auto k = round_half_even(rho * static_cast<double>(total));
  if (k < 1) {
    throw DomainError(fmt::format("rho * n1 * n2 = {} rounds to an empty mask", rho * static_cast<double>(total)));
  }
  std::vector<std::uint32_t> pool(total);
  std::iota(pool.begin(), pool.end(), std::uint32_t{0});
  partial_shuffle(pool, static_cast<std::size_t>(k), rng);
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(k));
  for (std::size_t t = 0; t < static_cast<std::size_t>(k); ++t) {
    entries.push_back({static_cast<Index>(pool[t] / static_cast<std::uint64_t>(n2)),
                       static_cast<Index>(pool[t] % static_cast<std::uint64_t>(n2))});
  }
  return ObservationSet(n1, n2, std::move(entries));
}

std::pair<ObservationSet, ObservationSet> split_train_test(const ObservationSet& omega, double train_fraction,
                                                           Rng& rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DomainError(fmt::format("train fraction must lie in (0, 1), got {}", train_fraction));
  }
  if (omega.size() < 2) {
    throw DomainError("cannot split an observation set with fewer than two entries");
  }
  std::vector<Entry> pool(omega.entries().begin(), omega.entries().end());
  const auto k = static_cast<std::size_t>(
      std::clamp<std::int64_t>(round_half_even(train_fraction * static_cast<double>(pool.size())), 0,
                               static_cast<std::int64_t>(pool.size())));
  partial_shuffle(pool, k, rng);
  std::vector<Entry> train(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<Entry> test(pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end());
  return {ObservationSet(omega.rows(), omega.cols(), std::move(train)),
          ObservationSet(omega.rows(), omega.cols(), std::move(test))};
}

}  // namespace csmc
