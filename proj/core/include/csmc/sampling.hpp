#pragma once

#include "csmc/matrix.hpp"

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace csmc {

/// Seeded pseudo-random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard library distributions are not, so bounded integers,
/// uniforms and normals are derived here from raw engine output. Equal seeds
/// give equal samples on every platform.
class Rng {
 public:
  static constexpr std::string_view algorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// A fresh stream for trial `index` of a run rooted at this seed.
  Rng fork(std::uint64_t index) const { return Rng(seed_ + index); }

  /// An independent stream keyed by `stream`; used to keep data generation
  /// and algorithm randomness apart inside one trial.
  Rng derive(std::uint64_t stream) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). Unbiased (rejection).
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Round half to even, the rounding used for every sample size.
std::int64_t round_half_even(double x);

/// The sampled column indices I of a CSMC run.
struct ColumnSelection {
  std::vector<Index> indices;  // sorted ascending, unique
  double alpha = 1.0;
  std::uint64_t seed = 0;

  Index size() const noexcept { return static_cast<Index>(indices.size()); }
};

/// Number of columns kept for ratio alpha: max(1, round(alpha * n2)).
Index selected_column_count(Index n2, double alpha);

/// Uniform selection of d columns without replacement (partial Fisher-Yates).
ColumnSelection sample_columns(Index n2, double alpha, Rng& rng);

/// round(rho * n1 * n2) distinct cells drawn uniformly without replacement.
ObservationSet sample_mask(Index n1, Index n2, double rho, Rng& rng);

/// Random partition of omega into a training set of round(fraction |omega|)
/// entries and a test set holding the rest.
std::pair<ObservationSet, ObservationSet> split_train_test(const ObservationSet& omega, double train_fraction,
                                                           Rng& rng);

}  // namespace csmc
