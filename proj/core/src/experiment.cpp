#include "csmc/experiment.hpp"

#include "csmc/errors.hpp"
#include "csmc/io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

namespace csmc {
namespace {

using json = nlohmann::json;

constexpr std::uint64_t data_stream = 0x1000;
constexpr std::uint64_t mask_stream = 0x2000;
constexpr std::uint64_t algorithm_stream = 0x3000;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

std::string cut_name(FrequencyCut c) { return c == FrequencyCut::rating_share ? "rating_share" : "entity_share"; }

FrequencyCut parse_cut(const std::string& s) {
  if (s == "rating_share") return FrequencyCut::rating_share;
  if (s == "entity_share") return FrequencyCut::entity_share;
  throw DomainError(fmt::format("unknown frequency cut '{}'", s));
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> keys, std::string_view where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
      throw DomainError(fmt::format("unknown configuration key '{}{}'", where, it.key()));
    }
  }
}

// Outcome of one algorithm on one prepared instance.
struct RunOutcome {
  Matrix estimate;
  double elapsed_s = 0.0;
};

RunOutcome run_algorithm(const AlgorithmSpec& alg, const MaskedMatrix& obs, Index instance_rank,
                         const ExperimentConfig& config, Rng rng) {
  SolverConfig cfg = config.solver;
  cfg.seed = rng.seed();
  if (alg.family == "NN") {
    auto r = nn_complete(obs, cfg);
    return {std::move(r.estimate), r.elapsed_s};
  }
  if (alg.family == "PGD") {
    auto r = pgd_complete(obs, cfg);
    return {std::move(r.estimate), r.elapsed_s};
  }
  if (alg.family == "MF") {
    const Index k = config.mf_rank > 0 ? config.mf_rank : instance_rank;
    if (k < 1) {
      throw DomainError("MF baseline needs mf.rank when the instance rank is unknown");
    }
    auto r = mf_als_complete(obs, k, config.mf_reg, cfg);
    return {std::move(r.estimate), r.elapsed_s};
  }
  const auto solver = alg.family == "CSNN" ? Stage1Solver::nn : Stage1Solver::pgd;
  auto report = csmc_complete(obs, alg.alpha, solver, cfg, rng);
  return {std::move(report.estimate), report.elapsed_s()};
}

TrialRecord base_record(std::size_t trial, const AlgorithmSpec& alg, double rho, Index rank) {
  TrialRecord rec;
  rec.trial = trial;
  rec.algorithm = alg.label();
  rec.alpha = alg.column_sampled() ? alg.alpha : 1.0;
  rec.rho = rho;
  rec.rank = rank;
  return rec;
}

// Runs all algorithms on one instance; `score` fills the metric fields.
std::vector<TrialRecord> run_instance(const ExperimentConfig& config, const std::vector<AlgorithmSpec>& algorithms,
                                      std::size_t trial, double rho, Index rank, const MaskedMatrix& obs,
                                      const Rng& trial_rng, std::uint64_t cell,
                                      const std::function<void(TrialRecord&, const Matrix&)>& score) {
  std::vector<TrialRecord> out;
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    auto rec = base_record(trial, algorithms[a], rho, rank);
    try {
      auto outcome =
          run_algorithm(algorithms[a], obs, rank, config, trial_rng.derive(algorithm_stream + cell * 64 + a));
      rec.elapsed_s = outcome.elapsed_s;
      score(rec, outcome.estimate);
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
      rec.epsilon = 0.0;
      rec.extra.clear();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::vector<TrialRecord>> run_units(const std::vector<std::function<std::vector<TrialRecord>()>>& units,
                                                int threads) {
  std::vector<std::vector<TrialRecord>> results(units.size());
  const auto workers = static_cast<std::size_t>(std::clamp<int>(threads, 1, std::max<int>(1, static_cast<int>(units.size()))));
  if (workers == 1) {
    for (std::size_t i = 0; i < units.size(); ++i) results[i] = units[i]();
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < units.size(); i = next++) {
          try {
            results[i] = units[i]();
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

json record_to_json(const TrialRecord& r) {
  json j{{"trial", r.trial},     {"algorithm", r.algorithm}, {"alpha", r.alpha},
         {"rho", r.rho},         {"rank", r.rank},           {"epsilon", r.failed ? json() : json(r.epsilon)},
         {"elapsed_s", r.elapsed_s}, {"failed", r.failed}};
  json extra = json::object();
  for (const auto& [k, v] : r.extra) extra[k] = v;
  j["metrics"] = extra;
  if (r.failed) j["error"] = r.error;
  return j;
}

json mean_std_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}, {"n", m.count}}; }

std::string cell_key(const std::string& algorithm, double rho, Index rank) {
  return fmt::format("{}_{}_{}", algorithm, io::format_double(rho), rank);
}

}  // namespace

std::string to_string(Suite s) {
  switch (s) {
    case Suite::synth:
      return "synth";
    case Suite::movielens:
      return "movielens";
    case Suite::inpaint:
      return "inpaint";
  }
  return "synth";
}

Suite parse_suite(std::string_view name) {
  if (name == "synth") return Suite::synth;
  if (name == "movielens") return Suite::movielens;
  if (name == "inpaint") return Suite::inpaint;
  throw DomainError(fmt::format("unknown suite '{}'", name));
}

std::string AlgorithmSpec::label() const {
  return column_sampled() ? fmt::format("{}-{}", family, io::format_double(alpha)) : family;
}

AlgorithmSpec parse_algorithm(std::string_view text) {
  const auto dash = text.find('-');
  AlgorithmSpec spec;
  spec.family = std::string(text.substr(0, dash));
  for (auto& c : spec.family) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  static const std::set<std::string> families{"NN", "PGD", "MF", "CSNN", "CSPGD"};
  if (!families.count(spec.family)) {
    throw DomainError(fmt::format("unknown algorithm '{}'", text));
  }
  if (dash == std::string_view::npos) {
    spec.alpha = spec.column_sampled() ? 0.0 : 1.0;
    return spec;
  }
  if (!spec.column_sampled()) {
    throw DomainError(fmt::format("algorithm '{}' takes no column ratio", spec.family));
  }
  const auto tail = text.substr(dash + 1);
  auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), spec.alpha);
  if (ec != std::errc() || ptr != tail.data() + tail.size() || !(spec.alpha > 0.0 && spec.alpha <= 1.0)) {
    throw DomainError(fmt::format("invalid column ratio in '{}'", text));
  }
  return spec;
}

std::vector<AlgorithmSpec> expand_algorithms(const std::vector<AlgorithmSpec>& algorithms,
                                             const std::vector<double>& alphas) {
  std::vector<AlgorithmSpec> out;
  for (const auto& a : algorithms) {
    if (a.column_sampled() && a.alpha == 0.0) {
      if (alphas.empty()) {
        throw DomainError(fmt::format("{} needs an alpha grid", a.family));
      }
      for (double alpha : alphas) out.push_back({a.family, alpha});
    } else {
      out.push_back(a);
    }
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw DomainError("algorithm list is empty");
  for (const auto& a : algorithms) {
    if (a.column_sampled() && !(a.alpha > 0.0 && a.alpha <= 1.0)) {
      throw DomainError(fmt::format("{} has no column ratio; give e.g. {}-0.2 or an alpha grid", a.family, a.family));
    }
  }
  if (trials < 1) throw DomainError("n_trials must be at least 1");
  if (threads < 1) throw DomainError("threads must be at least 1");
  solver.validate();
  if (suite == Suite::synth || suite == Suite::inpaint) {
    if (rhos.empty()) throw DomainError("rho grid is empty");
    for (double r : rhos) {
      if (!(r > 0.0 && r <= 1.0)) throw DomainError(fmt::format("rho {} outside (0, 1]", r));
    }
  }
  if (suite == Suite::synth) {
    if (ranks.empty()) throw DomainError("rank grid is empty");
    for (Index r : ranks) {
      if (r < 1 || r > std::min(n1, n2)) throw DomainError(fmt::format("rank {} invalid for {}x{}", r, n1, n2));
    }
  }
  if (suite == Suite::movielens && !(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DomainError("train fraction must lie in (0, 1)");
  }
  if (suite == Suite::inpaint && images.empty()) throw DomainError("inpaint suite needs at least one image");
  if (suite == Suite::movielens && ratings_path.empty()) throw DomainError("movielens suite needs a ratings file");
}

ExperimentConfig parse_experiment_config(std::string_view json_text, ExperimentConfig base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("invalid configuration JSON: {}", e.what()), 0);
  }
  if (!j.is_object()) throw ParseError("configuration must be a JSON object", 0);
  reject_unknown(j,
                 {"suite", "algorithms", "alpha", "rho", "rank", "trials", "seed", "out", "threads", "n1", "n2",
                  "noise_density", "noise_scale", "solver", "mf", "movielens", "inpaint"},
                 "");
  ExperimentConfig c = std::move(base);
  try {
    if (j.contains("suite")) c.suite = parse_suite(j["suite"].get<std::string>());
    std::vector<double> alphas;
    if (j.contains("alpha")) alphas = j["alpha"].get<std::vector<double>>();
    if (j.contains("algorithms")) {
      c.algorithms.clear();
      for (const auto& a : j["algorithms"]) c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    }
    c.algorithms = expand_algorithms(c.algorithms, alphas);
    if (j.contains("rho")) c.rhos = j["rho"].get<std::vector<double>>();
    if (j.contains("rank")) c.ranks = j["rank"].get<std::vector<Index>>();
    if (j.contains("trials")) c.trials = j["trials"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("n1")) c.n1 = j["n1"].get<Index>();
    if (j.contains("n2")) c.n2 = j["n2"].get<Index>();
    if (j.contains("noise_density")) c.noise_density = j["noise_density"].get<double>();
    if (j.contains("noise_scale")) c.noise_scale = j["noise_scale"].get<double>();
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      reject_unknown(s, {"lambda", "lambda_ratio", "step", "max_iters", "tol_rel", "eta", "lambda_min",
                         "lambda_min_ratio", "tol_feas", "trace_every", "threads"},
                     "solver.");
      if (s.contains("lambda")) {
        if (s["lambda"].is_null()) c.solver.lambda.reset();
        else c.solver.lambda = s["lambda"].get<double>();
      }
      if (s.contains("lambda_ratio")) c.solver.lambda_ratio = s["lambda_ratio"].get<double>();
      if (s.contains("step")) c.solver.step = s["step"].get<double>();
      if (s.contains("max_iters")) c.solver.max_iters = s["max_iters"].get<std::size_t>();
      if (s.contains("tol_rel")) c.solver.tol_rel = s["tol_rel"].get<double>();
      if (s.contains("eta")) c.solver.continuation.eta = s["eta"].get<double>();
      if (s.contains("lambda_min")) {
        if (s["lambda_min"].is_null()) c.solver.continuation.lambda_min.reset();
        else c.solver.continuation.lambda_min = s["lambda_min"].get<double>();
      }
      if (s.contains("lambda_min_ratio")) c.solver.continuation.lambda_min_ratio = s["lambda_min_ratio"].get<double>();
      if (s.contains("tol_feas")) c.solver.continuation.tol_feas = s["tol_feas"].get<double>();
      if (s.contains("trace_every")) c.solver.trace_every = s["trace_every"].get<std::size_t>();
      if (s.contains("threads")) c.solver.threads = s["threads"].get<int>();
    }
    if (j.contains("mf")) {
      const auto& m = j["mf"];
      reject_unknown(m, {"rank", "reg"}, "mf.");
      if (m.contains("rank")) c.mf_rank = m["rank"].get<Index>();
      if (m.contains("reg")) c.mf_reg = m["reg"].get<double>();
    }
    if (j.contains("movielens")) {
      const auto& m = j["movielens"];
      reject_unknown(m, {"ratings", "user_frac", "item_frac", "scale_min", "scale_max", "cut", "train_fraction"},
                     "movielens.");
      if (m.contains("ratings")) c.ratings_path = m["ratings"].get<std::string>();
      if (m.contains("user_frac")) c.movielens.user_frac = m["user_frac"].get<double>();
      if (m.contains("item_frac")) c.movielens.item_frac = m["item_frac"].get<double>();
      if (m.contains("scale_min")) c.movielens.scale.min = m["scale_min"].get<double>();
      if (m.contains("scale_max")) c.movielens.scale.max = m["scale_max"].get<double>();
      if (m.contains("cut")) c.movielens.cut = parse_cut(m["cut"].get<std::string>());
      if (m.contains("train_fraction")) c.train_fraction = m["train_fraction"].get<double>();
    }
    if (j.contains("inpaint")) {
      const auto& m = j["inpaint"];
      reject_unknown(m, {"images"}, "inpaint.");
      if (m.contains("images")) {
        c.images.clear();
        for (const auto& p : m["images"]) c.images.emplace_back(p.get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("invalid configuration value: {}", e.what()), 0);
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json algs = json::array();
  for (const auto& a : c.algorithms) algs.push_back(a.label());
  json images = json::array();
  for (const auto& p : c.images) images.push_back(p.string());
  json j{
      {"suite", to_string(c.suite)},
      {"algorithms", algs},
      {"rho", c.rhos},
      {"rank", c.ranks},
      {"trials", c.trials},
      {"seed", c.seed},
      {"out", c.out_dir.string()},
      {"threads", c.threads},
      {"n1", c.n1},
      {"n2", c.n2},
      {"noise_density", c.noise_density},
      {"noise_scale", c.noise_scale},
      {"solver",
       {{"lambda", c.solver.lambda ? json(*c.solver.lambda) : json()},
        {"lambda_ratio", c.solver.lambda_ratio},
        {"step", c.solver.step},
        {"max_iters", c.solver.max_iters},
        {"tol_rel", c.solver.tol_rel},
        {"eta", c.solver.continuation.eta},
        {"lambda_min", c.solver.continuation.lambda_min ? json(*c.solver.continuation.lambda_min) : json()},
        {"lambda_min_ratio", c.solver.continuation.lambda_min_ratio},
        {"tol_feas", c.solver.continuation.tol_feas},
        {"trace_every", c.solver.trace_every},
        {"threads", c.solver.threads}}},
      {"mf", {{"rank", c.mf_rank}, {"reg", c.mf_reg}}},
      {"movielens",
       {{"ratings", c.ratings_path.string()},
        {"user_frac", c.movielens.user_frac},
        {"item_frac", c.movielens.item_frac},
        {"scale_min", c.movielens.scale.min},
        {"scale_max", c.movielens.scale.max},
        {"cut", cut_name(c.movielens.cut)},
        {"train_fraction", c.train_fraction}}},
      {"inpaint", {{"images", images}}},
  };
  return j.dump(2);
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& trials) {
  // first-appearance order of cells keeps the table stable
  std::vector<std::tuple<std::string, double, Index>> order;
  std::map<std::tuple<std::string, double, Index>, std::vector<const TrialRecord*>> groups;
  for (const auto& t : trials) {
    auto key = std::make_tuple(t.algorithm, t.rho, t.rank);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&t);
  }
  std::vector<AggregateRow> rows;
  for (const auto& key : order) {
    const auto& members = groups[key];
    AggregateRow row;
    row.algorithm = std::get<0>(key);
    row.rho = std::get<1>(key);
    row.rank = std::get<2>(key);
    row.alpha = members.front()->alpha;
    std::vector<double> eps;
    std::vector<double> times;
    std::map<std::string, std::vector<double>> extra;
    for (const auto* m : members) {
      if (m->failed) {
        ++row.failed;
        continue;
      }
      eps.push_back(m->epsilon);
      times.push_back(m->elapsed_s);
      for (const auto& [k, v] : m->extra) extra[k].push_back(v);
    }
    row.epsilon = mean_std(eps);
    row.elapsed_s = mean_std(times);
    for (const auto& [k, v] : extra) row.extra[k] = mean_std(v);
    rows.push_back(std::move(row));
  }
  return rows;
}

ExperimentReport run_suite(const ExperimentConfig& config) {
  config.validate();
  if (config.suite == Suite::movielens && !std::filesystem::exists(config.ratings_path)) {
    throw std::runtime_error("ratings file not found: " + config.ratings_path.string());
  }
  for (const auto& img : config.images) {
    if (config.suite == Suite::inpaint && !std::filesystem::exists(img)) {
      throw std::runtime_error("image not found: " + img.string());
    }
  }

  const Rng root(config.seed);
  const auto& algorithms = config.algorithms;
  std::vector<std::function<std::vector<TrialRecord>()>> units;

  if (config.suite == Suite::synth) {
    std::uint64_t cell = 0;
    for (double rho : config.rhos) {
      for (Index rank : config.ranks) {
        for (std::size_t t = 0; t < config.trials; ++t) {
          units.emplace_back([&config, &algorithms, root, rho, rank, t, cell] {
            const Rng trial_rng = root.fork(t);
            SyntheticSpec spec{config.n1, config.n2, rank, config.noise_density, config.noise_scale,
                               trial_rng.derive(data_stream + cell).seed()};
            const Matrix truth = gen_synthetic(spec);
            Rng mask_rng = trial_rng.derive(mask_stream + cell);
            const MaskedMatrix obs(truth, sample_mask(truth.rows(), truth.cols(), rho, mask_rng));
            return run_instance(config, algorithms, t, rho, rank, obs, trial_rng, cell,
                                [&truth](TrialRecord& rec, const Matrix& est) {
                                  rec.epsilon = relative_error(est, truth);
                                });
          });
        }
        ++cell;
      }
    }
  } else if (config.suite == Suite::movielens) {
    auto data = std::make_shared<RatingsMatrix>(load_movielens(config.ratings_path, config.movielens));
    for (std::size_t t = 0; t < config.trials; ++t) {
      units.emplace_back([&config, &algorithms, root, t, data] {
        const Rng trial_rng = root.fork(t);
        Rng split_rng = trial_rng.derive(mask_stream);
        auto [train, test] = split_train_test(data->ratings.mask(), config.train_fraction, split_rng);
        const double rho = train.density();
        const MaskedMatrix obs(data->ratings.values(), std::move(train));
        const auto& truth = data->ratings.values();
        return run_instance(config, algorithms, t, rho, 0, obs, trial_rng, 0,
                            [&](TrialRecord& rec, const Matrix& est) {
                              std::vector<Prediction> pairs;
                              pairs.reserve(test.size());
                              for (const auto& e : test.entries()) {
                                pairs.push_back({est(e.row, e.col), truth(e.row, e.col)});
                              }
                              rec.extra["nmae"] = nmae(pairs, data->scale);
                              rec.extra["hr"] = hit_rate(pairs, data->scale);
                              rec.epsilon = relative_error(project_observed(est, test), project_observed(truth, test));
                            });
      });
    }
  } else {
    std::uint64_t cell = 0;
    for (std::size_t img = 0; img < config.images.size(); ++img) {
      auto truth = std::make_shared<Matrix>(load_image_gray(config.images[img]));
      for (double rho : config.rhos) {
        for (std::size_t t = 0; t < config.trials; ++t) {
          const std::size_t trial_id = img * config.trials + t;
          units.emplace_back([&config, &algorithms, root, rho, trial_id, cell, truth] {
            const Rng trial_rng = root.fork(trial_id);
            Rng mask_rng = trial_rng.derive(mask_stream + cell);
            const MaskedMatrix obs(*truth, sample_mask(truth->rows(), truth->cols(), rho, mask_rng));
            return run_instance(config, algorithms, trial_id, rho, 0, obs, trial_rng, cell,
                                [&](TrialRecord& rec, const Matrix& est) {
                                  rec.epsilon = relative_error(est, *truth);
                                  rec.extra["snr"] = snr(est, *truth);
                                });
          });
        }
        ++cell;
      }
    }
  }

  ExperimentReport report;
  report.config = config;
  for (auto& batch : run_units(units, config.threads)) {
    for (auto& rec : batch) report.trials.push_back(std::move(rec));
  }
  report.aggregates = aggregate(report.trials);
  return report;
}

std::string trials_csv(const std::vector<TrialRecord>& trials) {
  std::string out = std::string(trial_csv_header) + "\n";
  for (const auto& t : trials) {
    out += trial_csv_row(t);
    out += '\n';
  }
  return out;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json trials = json::array();
  for (const auto& t : report.trials) trials.push_back(record_to_json(t));
  json aggregates = json::array();
  for (const auto& a : report.aggregates) {
    json extra = json::object();
    for (const auto& [k, v] : a.extra) extra[k] = mean_std_json(v);
    aggregates.push_back({{"algorithm", a.algorithm},
                          {"alpha", a.alpha},
                          {"rho", a.rho},
                          {"rank", a.rank},
                          {"failed", a.failed},
                          {"epsilon", mean_std_json(a.epsilon)},
                          {"elapsed_s", mean_std_json(a.elapsed_s)},
                          {"metrics", extra}});
  }
  json ecdfs = json::object();
  for (const auto& a : report.aggregates) {
    std::vector<double> eps;
    for (const auto& t : report.trials) {
      if (!t.failed && t.algorithm == a.algorithm && t.rho == a.rho && t.rank == a.rank) eps.push_back(t.epsilon);
    }
    if (eps.empty()) continue;
    json steps = json::array();
    for (const auto& [x, f] : ecdf_steps(eps)) steps.push_back({x, f});
    ecdfs[cell_key(a.algorithm, a.rho, a.rank)] = steps;
  }
  json doc{{"config", json::parse(config_to_json(report.config))},
           {"trials", trials},
           {"aggregates", aggregates},
           {"ecdf", ecdfs}};
  write_text(dir / "report.json", doc.dump(2) + "\n");
  write_text(dir / "trials.csv", trials_csv(report.trials));
  emit_plots_data(report, dir);
}

std::vector<std::filesystem::path> emit_plots_data(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;

  for (const auto& a : report.aggregates) {
    std::vector<double> eps;
    for (const auto& t : report.trials) {
      if (!t.failed && t.algorithm == a.algorithm && t.rho == a.rho && t.rank == a.rank) eps.push_back(t.epsilon);
    }
    if (eps.empty()) continue;
    std::string text = "a,F\n";
    for (const auto& [x, f] : ecdf_steps(eps)) {
      text += fmt::format("{},{}\n", io::format_double(x), io::format_double(f));
    }
    const auto path = dir / fmt::format("ecdf_{}.csv", cell_key(a.algorithm, a.rho, a.rank));
    write_text(path, text);
    written.push_back(path);
  }

  std::string runtimes = "trial,algorithm,alpha,rho,rank,elapsed_s\n";
  for (const auto& t : report.trials) {
    if (t.failed) continue;
    runtimes += fmt::format("{},{},{},{},{},{}\n", t.trial, t.algorithm, io::format_double(t.alpha),
                            io::format_double(t.rho), t.rank, io::format_double(t.elapsed_s));
  }
  write_text(dir / "runtimes.csv", runtimes);
  written.push_back(dir / "runtimes.csv");

  std::set<std::string> metric_names;
  for (const auto& a : report.aggregates) {
    for (const auto& [k, v] : a.extra) metric_names.insert(k);
  }
  std::string metrics = "algorithm,alpha,rho,rank,trials,failed,epsilon_mean,epsilon_std,elapsed_mean,elapsed_std";
  for (const auto& name : metric_names) metrics += fmt::format(",{0}_mean,{0}_std", name);
  metrics += '\n';
  for (const auto& a : report.aggregates) {
    metrics += fmt::format("{},{},{},{},{},{},{},{},{},{}", a.algorithm, io::format_double(a.alpha),
                           io::format_double(a.rho), a.rank, a.epsilon.count + a.failed, a.failed,
                           io::format_double(a.epsilon.mean), io::format_double(a.epsilon.std),
                           io::format_double(a.elapsed_s.mean), io::format_double(a.elapsed_s.std));
    for (const auto& name : metric_names) {
      auto it = a.extra.find(name);
      if (it == a.extra.end()) {
        metrics += ",,";
      } else {
        metrics += fmt::format(",{},{}", io::format_double(it->second.mean), io::format_double(it->second.std));
      }
    }
    metrics += '\n';
  }
  write_text(dir / "metrics.csv", metrics);
  written.push_back(dir / "metrics.csv");
  return written;
}

}  // namespace csmc
