#include "csmc/metrics.hpp"

#include "csmc/errors.hpp"
#include "csmc/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace csmc {
namespace {

void same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(fmt::format("shape mismatch {}x{} vs {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
  }
}

void check_scale(RatingScale scale) {
  if (!(scale.max > scale.min)) {
    throw DomainError(fmt::format("rating scale [{}, {}] is empty", scale.min, scale.max));
  }
}

std::string optional_cell(const std::map<std::string, double>& extra, const char* key) {
  auto it = extra.find(key);
  return it == extra.end() ? std::string() : io::format_double(it->second);
}

}  // namespace

double relative_error(const Matrix& estimate, const Matrix& truth) {
  same_shape(estimate, truth);
  const double denom = truth.norm();
  if (denom == 0.0) {
    throw DomainError("relative error against a zero matrix");
  }
  return (truth - estimate).norm() / denom;
}

double ecdf(std::span<const double> errors, double a) {
  if (errors.empty()) {
    throw DomainError("ECDF of an empty sample");
  }
  const auto hits = std::count_if(errors.begin(), errors.end(), [a](double e) { return e <= a; });
  return static_cast<double>(hits) / static_cast<double>(errors.size());
}

std::vector<std::pair<double, double>> ecdf_steps(std::span<const double> errors) {
  if (errors.empty()) {
    throw DomainError("ECDF of an empty sample");
  }
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> steps;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) {
      continue;
    }
    steps.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  }
  return steps;
}

double nmae(std::span<const Prediction> pairs, RatingScale scale) {
  check_scale(scale);
  if (pairs.empty()) {
    throw DomainError("NMAE of an empty prediction set");
  }
  double sum = 0.0;
  for (const auto& p : pairs) {
    sum += std::abs(p.predicted - p.actual);
  }
  return sum / (static_cast<double>(pairs.size()) * (scale.max - scale.min));
}

double hit_rate(std::span<const Prediction> pairs, RatingScale scale) {
  check_scale(scale);
  if (pairs.empty()) {
    throw DomainError("hit rate of an empty prediction set");
  }
  std::size_t hits = 0;
  for (const auto& p : pairs) {
    const double rounded = std::floor(std::clamp(p.predicted, scale.min, scale.max) + 0.5);
    if (rounded == p.actual) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

double snr(const Matrix& estimate, const Matrix& truth) {
  same_shape(estimate, truth);
  const double err = (estimate - truth).norm();
  if (err == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 20.0 * std::log10(truth.norm() / err);
}

std::string trial_csv_row(const TrialRecord& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{}", r.trial, r.algorithm, io::format_double(r.alpha),
                     io::format_double(r.rho), r.rank,
                     r.failed ? std::string("nan") : io::format_double(r.epsilon), io::format_double(r.elapsed_s),
                     optional_cell(r.extra, "nmae"), optional_cell(r.extra, "hr"), optional_cell(r.extra, "snr"));
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  out.count = values.size();
  if (values.empty()) {
    return out;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

}  // namespace csmc
