#pragma once

#include "csmc/matrix.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace csmc {

/// ||M - M_hat||_F / ||M||_F.
double relative_error(const Matrix& estimate, const Matrix& truth);

/// Fraction of errors <= a.
double ecdf(std::span<const double> errors, double a);

/// Step points (a, F(a)) of the empirical CDF at each distinct sample value.
std::vector<std::pair<double, double>> ecdf_steps(std::span<const double> errors);

struct Prediction {
  double predicted = 0.0;
  double actual = 0.0;
};

struct RatingScale {
  double min = 1.0;
  double max = 5.0;
};

/// Mean |predicted - actual| divided by the rating range.
double nmae(std::span<const Prediction> pairs, RatingScale scale);

/// Fraction of predictions whose clamped, half-up rounded value equals the
/// actual rating.
double hit_rate(std::span<const Prediction> pairs, RatingScale scale);

/// 20 log10(||M||_F / ||M_hat - M||_F) in dB; +infinity when M_hat == M.
double snr(const Matrix& estimate, const Matrix& truth);

/// Per-trial record written to trials.csv.
struct TrialRecord {
  std::size_t trial = 0;
  std::string algorithm;
  double alpha = 1.0;
  double rho = 0.0;
  Index rank = 0;
  double epsilon = 0.0;
  double elapsed_s = 0.0;
  std::map<std::string, double> extra;  // nmae, hr, snr when measured
  bool failed = false;
  std::string error;
};

/// Column order of the trials CSV.
inline constexpr const char* trial_csv_header = "trial,algorithm,alpha,rho,rank,epsilon,elapsed_s,nmae,hr,snr";

std::string trial_csv_row(const TrialRecord& r);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for a single value
  std::size_t count = 0;
};

MeanStd mean_std(std::span<const double> values);

}  // namespace csmc
