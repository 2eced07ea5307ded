// csmc: single-shot completion, benchmark suites and recovery diagnostics.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 solver divergence.

#include <csmc/datasets.hpp>
#include <csmc/diagnostics.hpp>
#include <csmc/errors.hpp>
#include <csmc/experiment.hpp>
#include <csmc/io.hpp>
#include <csmc/metrics.hpp>
#include <csmc/pipeline.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace csmc;

namespace {

enum Exit { ok = 0, usage = 1, data = 2, divergence = 3 };

// Configuration problems found after CLI parsing still count as usage errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

struct SuiteFlags {
  std::string config;
  std::vector<std::string> algorithms;
  std::vector<double> alpha;
  std::vector<double> rho;
  std::vector<Index> rank;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> solver;
  std::optional<std::string> out;
  std::optional<int> threads;
};

void add_suite_flags(CLI::App* app, SuiteFlags& f) {
  app->add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--algorithms", f.algorithms, "e.g. NN,CSNN-0.2,MF (CSNN/CSPGD without suffix use --alpha)")
      ->delimiter(',');
  app->add_option("--alpha", f.alpha, "column ratio grid")->delimiter(',');
  app->add_option("--rho", f.rho, "observed-entry density grid")->delimiter(',');
  app->add_option("--trials", f.trials, "trials per cell");
  app->add_option("--seed", f.seed, "root seed");
  app->add_option("--solver", f.solver, "default nuclear-norm solver family")->check(CLI::IsMember({"pgd", "nn"}));
  app->add_option("--out", f.out, "output directory");
  app->add_option("--threads", f.threads, "trial worker threads")->check(CLI::PositiveNumber);
}

// File values first, then flags, then suite defaults for anything still unset.
ExperimentConfig build_config(Suite suite, const SuiteFlags& f, json extra) {
  json j = f.config.empty() ? json::object() : json::parse(read_file(f.config), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw UsageError("configuration file is not a JSON object");
  j["suite"] = to_string(suite);
  if (!f.algorithms.empty()) j["algorithms"] = f.algorithms;
  if (!f.alpha.empty()) j["alpha"] = f.alpha;
  if (!f.rho.empty()) j["rho"] = f.rho;
  if (!f.rank.empty()) j["rank"] = f.rank;
  if (f.trials) j["trials"] = *f.trials;
  if (f.seed) j["seed"] = *f.seed;
  if (f.out) j["out"] = *f.out;
  if (f.threads) j["threads"] = *f.threads;
  j.merge_patch(extra);
  if (!j.contains("algorithms")) {
    const bool pgd = f.solver && *f.solver == "pgd";
    j["algorithms"] = pgd ? json{"PGD", "CSPGD"} : json{"NN", "CSNN"};
    if (suite == Suite::synth) j["algorithms"].push_back("MF");
  }
  if (!j.contains("alpha")) j["alpha"] = suite == Suite::synth ? json{0.2} : json{0.7};
  if (suite == Suite::inpaint && !j.contains("rho")) j["rho"] = json{0.2};
  ExperimentConfig c = parse_experiment_config(j.dump());
  if (c.out_dir.empty()) c.out_dir = fmt::format("csmc-{}", to_string(suite));
  c.validate();
  return c;
}

void print_aggregates(const ExperimentReport& report) {
  std::set<std::string> names;
  for (const auto& a : report.aggregates)
    for (const auto& [k, v] : a.extra) names.insert(k);
  std::string header = fmt::format("{:<12} {:>6} {:>5} {:>5} {:>12} {:>10} {:>9}", "algorithm", "rho", "rank", "fail",
                                   "eps mean", "eps std", "time [s]");
  for (const auto& n : names) header += fmt::format(" {:>9}", n);
  fmt::print("{}\n", header);
  for (const auto& a : report.aggregates) {
    std::string row = fmt::format("{:<12} {:>6} {:>5} {:>5} {:>12.4e} {:>10.2e} {:>9.3f}", a.algorithm, a.rho, a.rank,
                                  a.failed, a.epsilon.mean, a.epsilon.std, a.elapsed_s.mean);
    for (const auto& n : names) {
      auto it = a.extra.find(n);
      row += it == a.extra.end() ? fmt::format(" {:>9}", "-") : fmt::format(" {:>9.4f}", it->second.mean);
    }
    fmt::print("{}\n", row);
  }
}

int run_and_report(const ExperimentConfig& config, const json& provenance) {
  auto report = run_suite(config);
  write_report(report, config.out_dir);
  write_json(config.out_dir / "provenance.json", provenance);
  print_aggregates(report);
  fmt::print("wrote {}\n", config.out_dir.string());
  return ok;
}

json ratings_provenance(const fs::path& path, const ExperimentConfig& c) {
  auto data = load_movielens(path, c.movielens);
  return {{"path", fs::absolute(path).string()},
          {"rows_read", data.stats.rows_read},
          {"users_total", data.stats.users_total},
          {"items_total", data.stats.items_total},
          {"ratings_after_user_cut", data.stats.ratings_after_user_cut},
          {"ratings_kept", data.stats.ratings_kept},
          {"shape", {data.ratings.rows(), data.ratings.cols()}},
          {"density", data.ratings.density()},
          {"user_frac", c.movielens.user_frac},
          {"item_frac", c.movielens.item_frac},
          {"scale", {data.scale.min, data.scale.max}}};
}

json images_provenance(const ExperimentConfig& c) {
  json list = json::array();
  for (const auto& p : c.images) {
    const Matrix img = load_image_gray(p);
    list.push_back({{"path", fs::absolute(p).string()}, {"shape", {img.rows(), img.cols()}}});
  }
  return {{"images", list}};
}

json matrix_provenance(const fs::path& path, const MaskedMatrix& m) {
  return {{"path", fs::absolute(path).string()},
          {"shape", {m.rows(), m.cols()}},
          {"observed", m.mask().size()},
          {"density", m.density()}};
}

// ||R_Omega(X - M)||_F / ||R_Omega(M)||_F
double observed_residual(const Matrix& x, const MaskedMatrix& obs) {
  double num = 0.0, den = 0.0;
  for (const auto& e : obs.mask().entries()) {
    const double m = obs.values()(e.row, e.col);
    num += (x(e.row, e.col) - m) * (x(e.row, e.col) - m);
    den += m * m;
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

struct CompleteFlags {
  std::string input;
  std::string output;
  std::string truth;
  std::string config;
  double alpha = 1.0;
  std::string solver = "nn";
  std::uint64_t seed = 0;
  int threads = 1;
  std::string report;
};

SolverConfig solver_from(const std::string& config_path, std::uint64_t seed, int threads) {
  SolverConfig cfg;
  if (!config_path.empty()) {
    json j = json::parse(read_file(config_path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw UsageError("configuration file is not a JSON object");
    json only{{"solver", j.value("solver", json::object())}};
    cfg = parse_experiment_config(only.dump()).solver;
  }
  cfg.seed = seed;
  cfg.threads = threads;
  cfg.validate();
  return cfg;
}

int cmd_complete(const CompleteFlags& f) {
  if (!(f.alpha > 0.0 && f.alpha <= 1.0)) throw UsageError("--alpha must lie in (0, 1]");
  SolverConfig cfg;
  try {
    cfg = solver_from(f.config, f.seed, f.threads);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  const auto solver = parse_stage1_solver(f.solver);
  const MaskedMatrix obs = io::read_matrix(f.input);

  json summary{{"input", matrix_provenance(f.input, obs)}, {"solver", f.solver}, {"alpha", f.alpha}, {"seed", f.seed}};
  Matrix estimate;
  if (f.alpha == 1.0) {
    auto r = complete(obs, solver, cfg);
    summary["status"] = to_string(r.status);
    summary["iterations"] = r.iterations;
    summary["residual"] = r.residual;
    summary["elapsed_s"] = r.elapsed_s;
    estimate = std::move(r.estimate);
  } else {
    Rng rng(f.seed);
    auto r = csmc_complete(obs, f.alpha, solver, cfg, rng);
    summary["status"] = to_string(r.stage1.status);
    summary["iterations"] = r.stage1.iterations;
    summary["selected_columns"] = r.selection.indices;
    summary["unconstrained_columns"] = r.unconstrained_columns;
    summary["residual"] = observed_residual(r.estimate, obs);
    summary["elapsed_s"] = {{"stage1", r.stage1_s}, {"stage2", r.stage2_s}};
    estimate = std::move(r.estimate);
  }
  if (fs::path(f.output).has_parent_path()) fs::create_directories(fs::path(f.output).parent_path());
  io::write_csv(fs::path(f.output), estimate);
  if (!f.truth.empty()) {
    const MaskedMatrix truth = io::read_matrix(f.truth);
    if (truth.mask().size() != static_cast<std::size_t>(truth.rows() * truth.cols())) {
      throw DomainError("ground truth must be fully observed");
    }
    summary["epsilon"] = relative_error(estimate, truth.values());
  }
  write_json(fs::path(f.output).string() + ".provenance.json", summary["input"]);
  if (!f.report.empty()) write_json(f.report, summary);
  fmt::print("{}\n", summary.dump(2));
  return ok;
}

struct DiagnoseFlags {
  std::string input;
  double gamma = std::log(20.0);
  double alpha = 0.2;
  double rank_tol = default_rank_tol;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_diagnose(const DiagnoseFlags& f) {
  if (!(f.gamma > 0.0)) throw UsageError("--gamma must be positive");
  if (!(f.alpha > 0.0 && f.alpha <= 1.0)) throw UsageError("--alpha must lie in (0, 1]");
  const MaskedMatrix obs = io::read_matrix(f.input);
  const bool full = obs.mask().size() == static_cast<std::size_t>(obs.rows() * obs.cols());
  // coherence needs the whole matrix; a partially observed one is completed first
  Matrix m = full ? obs.values() : nn_complete(obs, SolverConfig{}).estimate;
  const auto coh_m = coherence(m, f.rank_tol);
  Rng rng(f.seed);
  const auto selection = sample_columns(m.cols(), f.alpha, rng);
  const Matrix c = m(Eigen::all, selection.indices);
  const auto coh_c = coherence(c, f.rank_tol);
  const double kappa = condition_number(m, f.rank_tol);
  const RecoveryInputs in{m.rows(), m.cols(), coh_m.rank, coh_c.rank, coh_m.mu0, coh_c.mu0, kappa, f.gamma};
  const auto b = recovery_bounds(in);
  json out{{"input", matrix_provenance(f.input, obs)},
           {"completed_before_analysis", !full},
           {"n1", in.n1},
           {"n2", in.n2},
           {"rank", in.rank},
           {"rank_c", in.rank_c},
           {"selected_columns", selection.size()},
           {"mu0_m", in.mu0_m},
           {"mu0_c", in.mu0_c},
           {"kappa", number_or_null(kappa)},
           {"gamma", f.gamma},
           {"d_min", b.d_min},
           {"omega_min", b.omega_min},
           {"success_prob", b.success_prob},
           {"thm1_d_min", b.thm1_d_min},
           {"coherence_inflation", number_or_null(b.coherence_inflation)}};
  if (!f.output.empty()) write_json(f.output, out);
  fmt::print("{}\n", out.dump(2));
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank matrix completion with column subset selection"};
  app.require_subcommand(1);

  CompleteFlags cf;
  auto* complete_cmd = app.add_subcommand("complete", "complete a matrix file (CSV with nan holes or MatrixMarket)");
  complete_cmd->add_option("input", cf.input, "observed matrix")->required()->check(CLI::ExistingFile);
  complete_cmd->add_option("-o,--output", cf.output, "completed matrix (CSV)")->required();
  complete_cmd->add_option("--truth", cf.truth, "fully observed ground truth for the relative error")
      ->check(CLI::ExistingFile);
  complete_cmd->add_option("--config", cf.config, "JSON file; only its \"solver\" object is used")
      ->check(CLI::ExistingFile);
  complete_cmd->add_option("--alpha", cf.alpha, "column ratio; 1 runs the solver on the whole matrix");
  complete_cmd->add_option("--solver", cf.solver, "nuclear-norm solver")->check(CLI::IsMember({"pgd", "nn"}));
  complete_cmd->add_option("--seed", cf.seed, "column sampling seed");
  complete_cmd->add_option("--threads", cf.threads, "stage-II threads")->check(CLI::PositiveNumber);
  complete_cmd->add_option("--report", cf.report, "write the JSON summary here as well");

  SuiteFlags synth_flags;
  std::optional<Index> n1, n2;
  auto* synth_cmd = app.add_subcommand("synth-bench", "synthetic recovery benchmark");
  add_suite_flags(synth_cmd, synth_flags);
  synth_cmd->add_option("--rank", synth_flags.rank, "rank grid")->delimiter(',');
  synth_cmd->add_option("--n1", n1, "rows");
  synth_cmd->add_option("--n2", n2, "columns");

  SuiteFlags rec_flags;
  std::string ratings;
  std::optional<double> train_fraction;
  auto* rec_cmd = app.add_subcommand(
      "recommend", "rating prediction on a MovieLens ratings.csv (https://grouplens.org/datasets/movielens/)");
  add_suite_flags(rec_cmd, rec_flags);
  rec_cmd->add_option("--ratings", ratings, "userId,movieId,rating,timestamp CSV")->check(CLI::ExistingFile);
  rec_cmd->add_option("--train-fraction", train_fraction, "share of known ratings used for training");

  SuiteFlags inp_flags;
  std::vector<std::string> images;
  auto* inp_cmd = app.add_subcommand("inpaint", "grayscale image inpainting");
  add_suite_flags(inp_cmd, inp_flags);
  inp_cmd->add_option("--image", images, "8-bit grayscale PNG or PGM (repeatable)")->check(CLI::ExistingFile);

  DiagnoseFlags df;
  auto* diag_cmd = app.add_subcommand("diagnose", "coherence and sample-size conditions for exact recovery");
  diag_cmd->add_option("input", df.input, "matrix file")->required()->check(CLI::ExistingFile);
  diag_cmd->add_option("--gamma", df.gamma, "confidence parameter");
  diag_cmd->add_option("--alpha", df.alpha, "column ratio used to estimate the coherence of C");
  diag_cmd->add_option("--rank-tol", df.rank_tol, "relative singular value cutoff");
  diag_cmd->add_option("--seed", df.seed, "column sampling seed");
  diag_cmd->add_option("-o,--output", df.output, "write the JSON here as well");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*complete_cmd) return cmd_complete(cf);
    if (*diag_cmd) return cmd_diagnose(df);
    if (*synth_cmd) {
      json extra = json::object();
      if (n1) extra["n1"] = *n1;
      if (n2) extra["n2"] = *n2;
      auto c = [&] {
        try {
          return build_config(Suite::synth, synth_flags, extra);
        } catch (const std::exception& e) {
          throw UsageError(e.what());
        }
      }();
      return run_and_report(c, {{"generator", "gen_synthetic"}, {"n1", c.n1}, {"n2", c.n2}});
    }
    if (*rec_cmd) {
      json extra = json::object();
      if (!ratings.empty()) extra["movielens"]["ratings"] = ratings;
      if (train_fraction) extra["movielens"]["train_fraction"] = *train_fraction;
      auto c = [&] {
        try {
          return build_config(Suite::movielens, rec_flags, extra);
        } catch (const std::exception& e) {
          throw UsageError(e.what());
        }
      }();
      if (!fs::exists(c.ratings_path)) throw std::runtime_error("ratings file not found: " + c.ratings_path.string());
      return run_and_report(c, ratings_provenance(c.ratings_path, c));
    }
    if (*inp_cmd) {
      json extra = json::object();
      if (!images.empty()) extra["inpaint"]["images"] = images;
      auto c = [&] {
        try {
          return build_config(Suite::inpaint, inp_flags, extra);
        } catch (const std::exception& e) {
          throw UsageError(e.what());
        }
      }();
      return run_and_report(c, images_provenance(c));
    }
  } catch (const UsageError& e) {
    fmt::print(stderr, "csmc: {}\n", e.what());
    return usage;
  } catch (const DivergenceError& e) {
    fmt::print(stderr, "csmc: {}\n", e.what());
    return divergence;
  } catch (const std::exception& e) {
    fmt::print(stderr, "csmc: {}\n", e.what());
    return data;
  }
  return usage;
}
