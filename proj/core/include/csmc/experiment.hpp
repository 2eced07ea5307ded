#pragma once

// Seeded benchmark suites: synthetic recovery, MovieLens rating prediction
// and grayscale inpainting. Every trial derives its randomness from
// root seed + trial index, so reruns with the same configuration reproduce
// the trial table exactly apart from wall-clock columns.

#include "csmc/datasets.hpp"
#include "csmc/metrics.hpp"
#include "csmc/pipeline.hpp"
#include "csmc/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace csmc {

enum class Suite { synth, movielens, inpaint };

std::string to_string(Suite s);
Suite parse_suite(std::string_view name);

/// One benchmarked method. `family` is NN, PGD, MF, CSNN or CSPGD; the
/// column-sampling families carry their alpha.
struct AlgorithmSpec {
  std::string family;
  double alpha = 1.0;

  bool column_sampled() const noexcept { return family == "CSNN" || family == "CSPGD"; }
  std::string label() const;  // e.g. "CSNN-0.2"
};

/// Parses "NN", "MF", "CSNN-0.3", ... A column-sampled family without a
/// suffix is returned with alpha = 0 and must be expanded against an alpha grid.
AlgorithmSpec parse_algorithm(std::string_view text);

/// Replaces every suffix-less column-sampled entry by one entry per alpha.
std::vector<AlgorithmSpec> expand_algorithms(const std::vector<AlgorithmSpec>& algorithms,
                                             const std::vector<double>& alphas);

struct ExperimentConfig {
  Suite suite = Suite::synth;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<double> rhos{0.5};
  std::vector<Index> ranks{5};
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  SolverConfig solver;
  std::filesystem::path out_dir;
  int threads = 1;  // trial-level worker pool

  // synthetic instances
  Index n1 = 300;
  Index n2 = 1000;
  double noise_density = 0.3;
  double noise_scale = 1.0;

  // matrix-factorization baseline; rank 0 means "use the instance rank"
  Index mf_rank = 0;
  double mf_reg = 1e-2;

  // rating prediction
  std::filesystem::path ratings_path;
  MovieLensOptions movielens;
  double train_fraction = 0.8;

  // inpainting
  std::vector<std::filesystem::path> images;

  /// Throws DomainError on an empty grid or an out-of-range value.
  void validate() const;
};

/// Parses a JSON configuration on top of `base`. Unknown keys are rejected.
ExperimentConfig parse_experiment_config(std::string_view json_text, ExperimentConfig base = {});

/// Full effective configuration as JSON.
std::string config_to_json(const ExperimentConfig& config);

struct AggregateRow {
  std::string algorithm;
  double alpha = 1.0;
  double rho = 0.0;
  Index rank = 0;
  std::size_t failed = 0;
  MeanStd epsilon;
  MeanStd elapsed_s;
  std::map<std::string, MeanStd> extra;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;  // ordered by cell, trial, algorithm
  std::vector<AggregateRow> aggregates;
};

/// Mean/std per (algorithm, rho, rank) over the successful trials.
std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& trials);

/// Runs every (cell, trial, algorithm) combination. Data files are checked
/// before any trial starts; a failing trial becomes a failed record.
ExperimentReport run_suite(const ExperimentConfig& config);

std::string trials_csv(const std::vector<TrialRecord>& trials);

/// report.json, trials.csv and the plot tables below, written into `dir`.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// ecdf_<algo>_<rho>_<rank>.csv per cell, runtimes.csv and metrics.csv.
/// Returns the written paths.
std::vector<std::filesystem::path> emit_plots_data(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace csmc
