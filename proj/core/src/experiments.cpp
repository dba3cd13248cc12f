#include "fairbayes/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "fairbayes/fair_threshold.hpp"
#include "fairbayes/fairness_metrics.hpp"
#include "fairbayes/gaussian_oracle.hpp"
#include "fairbayes/random.hpp"
#include "fairbayes/tabular_ingest.hpp"

namespace fairbayes {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Purposes for derive_seed(master, task, purpose).
enum Purpose : std::uint64_t { kPopulation = 0, kTrain = 1, kTest = 2, kEval = 3, kFit = 4, kSplit = 5 };

struct MeanSd {
  double mean = kNaN;
  double sd = kNaN;
};

MeanSd mean_sd(const std::vector<double>& v) {
  MeanSd r;
  if (v.empty()) return r;
  r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return r;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()), fits_(logistic_fit_count()) {}
  void finish(RunStats* stats) const {
    if (stats == nullptr) return;
    stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    stats->fits = logistic_fit_count() - fits_;
  }

 private:
  std::chrono::steady_clock::time_point start_;
  std::uint64_t fits_;
};

std::size_t worker_count(const ExperimentConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

FairnessConstraint constraint_for(const ExperimentConfig& cfg, double delta) {
  return {cfg.measure, delta, cfg.measure == Measure::DP ? cfg.cost : 0.5};
}

OracleSolution oracle_for(const GaussianPopulation& pop, const ExperimentConfig& cfg, double delta) {
  if (cfg.measure == Measure::DP && cfg.cost != 0.5) return oracle_cost_sensitive(pop, cfg.cost, delta);
  return oracle_rule(pop, cfg.measure, delta);
}

std::vector<AffineScore> affine_scores(const LogisticModel& model) {
  std::vector<AffineScore> out;
  for (int a = 0; a < model.group_count(); ++a) out.push_back(model.affine_score(a));
  return out;
}

GaussianPopulation population_for_rep(const ExperimentConfig& cfg, const SynthSpec& spec, std::size_t rep) {
  SynthSpec s = spec;
  if (cfg.redraw_population) s.seed = derive_seed(cfg.seed, rep, kPopulation);
  return draw_population(s);
}

TrainingConfig training_for(const ExperimentConfig& cfg, std::uint64_t task) {
  TrainingConfig t = cfg.training;
  t.seed = derive_seed(cfg.seed, task, kFit);
  return t;
}

SynthSpec multiclass_spec(const ExperimentConfig& cfg) {
  if (cfg.synth.group_count() == cfg.groups) return cfg.synth;
  return SynthSpec::multiclass_default(cfg.groups, cfg.synth.seed);
}

std::vector<std::pair<std::string, std::string>> common_meta(const ExperimentConfig& cfg) {
  return {{"measure", std::string(to_string(cfg.measure))},
          {"cost", format_double(cfg.cost)},
          {"seed", std::to_string(cfg.seed)},
          {"reps", std::to_string(cfg.reps)},
          {"randomize", cfg.randomize ? "true" : "false"}};
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::runtime_error("expected a boolean, got '" + s + "'");
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  for (double v : parse_doubles(s)) {
    if (v < 1 || v != std::floor(v)) throw std::runtime_error("sample sizes must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::string_view calibration_name(CalibrationSplit c) {
  switch (c) {
    case CalibrationSplit::train: return "train";
    case CalibrationSplit::val: return "val";
    case CalibrationSplit::train_val: return "train+val";
  }
  return "val";
}

// One train/val/test realisation of a tabular dataset.
struct TabularSplit {
  Dataset train;
  Dataset calibration;
  Dataset test;
  IngestReport ingest;
  std::vector<std::string> warnings;
};

struct TabularSource {
  ColumnSchema schema;
  RawTable table;
  RawTable test_table;
  bool separate_test = false;
  std::vector<std::size_t> usable;
  std::vector<std::size_t> test_usable;
};

TabularSource load_tabular(const ExperimentConfig& cfg) {
  TabularSource s;
  s.schema = ColumnSchema::load(cfg.schema);
  s.table = read_csv(cfg.data);
  s.usable = usable_rows(s.schema, s.table);
  if (!cfg.test_data.empty()) {
    s.separate_test = true;
    s.test_table = read_csv(cfg.test_data);
    s.test_usable = usable_rows(s.schema, s.test_table);
  }
  if (s.usable.empty()) throw std::runtime_error("no usable rows in " + cfg.data.string());
  return s;
}

TabularSplit make_split(const ExperimentConfig& cfg, const TabularSource& src, std::uint64_t seed) {
  std::array<double, 3> fr = cfg.split;
  if (src.separate_test) {
    const double tv = fr[0] + fr[1];
    fr = {fr[0] / tv, fr[1] / tv, 0.0};
  }
  const auto parts = split_indices(src.usable.size(), fr, seed);
  std::array<std::vector<std::size_t>, 3> rows;
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i : parts[k]) rows[k].push_back(src.usable[i]);
  }
  const FittedSchema fitted = FittedSchema::fit(src.schema, src.table, rows[0]);
  TabularSplit out;
  out.train = fitted.encode(src.table, rows[0], out.ingest);
  std::vector<std::size_t> calib;
  switch (cfg.calibrate_on) {
    case CalibrationSplit::train: calib = rows[0]; break;
    case CalibrationSplit::val: calib = rows[1]; break;
    case CalibrationSplit::train_val:
      calib = rows[0];
      calib.insert(calib.end(), rows[1].begin(), rows[1].end());
      break;
  }
  IngestReport scratch;
  out.calibration = fitted.encode(src.table, calib, scratch);
  if (src.separate_test) {
    out.test = fitted.encode(src.test_table, src.test_usable, out.ingest);
  } else {
    out.test = fitted.encode(src.table, rows[2], out.ingest);
  }
  out.warnings = out.ingest.warnings;
  return out;
}

std::vector<double> tradeoff_grid(const ExperimentConfig& cfg, double initial) {
  if (!cfg.deltas.empty()) {
    std::vector<double> d = cfg.deltas;
    std::sort(d.begin(), d.end());
    return d;
  }
  const double top = cfg.delta_max > 0.0 ? cfg.delta_max : std::abs(initial);
  std::vector<double> d;
  const std::size_t k = std::max<std::size_t>(cfg.grid_points, 1);
  for (std::size_t i = 0; i < k; ++i) {
    d.push_back(k == 1 ? 0.0 : top * static_cast<double>(i) / static_cast<double>(k - 1));
  }
  return d;
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::synth_binary: return "synth";
    case ExperimentKind::synth_multiclass: return "multiclass";
    case ExperimentKind::tabular: return "tabular";
    case ExperimentKind::tradeoff: return "tradeoff";
    case ExperimentKind::oracle_compare: return "oracle-compare";
  }
  return "synth";
}

ExperimentKind parse_experiment_kind(std::string_view s) {
  if (s == "synth" || s == "synth-binary") return ExperimentKind::synth_binary;
  if (s == "multiclass" || s == "synth-multiclass") return ExperimentKind::synth_multiclass;
  if (s == "tabular") return ExperimentKind::tabular;
  if (s == "tradeoff") return ExperimentKind::tradeoff;
  if (s == "oracle-compare") return ExperimentKind::oracle_compare;
  throw std::invalid_argument("unknown experiment kind '" + std::string(s) + "'");
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.training.group_mode = GroupMode::per_group;
  switch (kind) {
    case ExperimentKind::synth_binary: break;
    case ExperimentKind::synth_multiclass:
      c.synth = SynthSpec::multiclass_default(c.groups);
      c.n_train = 0;
      c.deltas = {0.0};
      break;
    case ExperimentKind::tabular:
      c.deltas = {0.0, 0.04, 0.08, 0.12};
      c.reps = 10;
      c.training.group_mode = GroupMode::joint;
      c.training.learning_rate = 0.5;
      break;
    case ExperimentKind::tradeoff:
      c.deltas.clear();
      c.reps = 1;
      break;
    case ExperimentKind::oracle_compare:
      c.deltas = {0.1, 0.2};
      c.reps = 5;
      break;
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_doc(const KeyValueDoc& doc, ExperimentKind fallback_kind) {
  const ExperimentKind kind = doc.contains("kind") ? parse_experiment_kind(*doc.get("kind")) : fallback_kind;
  ExperimentConfig c = defaults(kind);
  if (auto v = doc.get("measure")) c.measure = parse_measure(*v);
  if (auto v = doc.get("cost")) c.cost = parse_double(*v);
  if (auto v = doc.get("deltas")) c.deltas = parse_doubles(*v);
  if (auto v = doc.get("reps")) c.reps = static_cast<std::size_t>(parse_int(*v));
  if (auto v = doc.get("seed")) c.seed = std::stoull(*v);
  if (auto v = doc.get("randomize")) c.randomize = parse_bool(*v);
  if (auto v = doc.get("threads")) c.threads = static_cast<std::size_t>(parse_int(*v));
  if (auto v = doc.get("groups")) {
    c.groups = static_cast<int>(parse_int(*v));
    if (kind == ExperimentKind::synth_multiclass) c.synth = SynthSpec::multiclass_default(c.groups);
  }
  c.synth = SynthSpec::from_doc(doc, c.synth);
  if (auto v = doc.get("redraw_population")) c.redraw_population = parse_bool(*v);
  if (auto v = doc.get("n_train")) c.n_train = static_cast<std::size_t>(parse_int(*v));
  if (auto v = doc.get("n_test")) c.n_test = static_cast<std::size_t>(parse_int(*v));
  if (auto v = doc.get("n_eval")) c.n_eval = static_cast<std::size_t>(parse_int(*v));
  if (auto v = doc.get("train.learning_rate")) c.training.learning_rate = parse_double(*v);
  if (auto v = doc.get("train.epochs")) c.training.epochs = static_cast<std::size_t>(parse_int(*v));
  if (auto v = doc.get("train.batch_size")) c.training.batch_size = static_cast<std::size_t>(parse_int(*v));
  if (auto v = doc.get("train.l2")) c.training.l2 = parse_double(*v);
  if (auto v = doc.get("train.standardize")) c.training.standardize = parse_bool(*v);
  if (auto v = doc.get("train.group_mode")) {
    if (*v == "joint") {
      c.training.group_mode = GroupMode::joint;
    } else if (*v == "per_group") {
      c.training.group_mode = GroupMode::per_group;
    } else {
      throw std::runtime_error("train.group_mode must be joint or per_group");
    }
  }
  if (auto v = doc.get("data")) c.data = *v;
  if (auto v = doc.get("test_data")) c.test_data = *v;
  if (auto v = doc.get("schema")) c.schema = *v;
  if (auto v = doc.get("split")) {
    const auto f = parse_doubles(*v);
    if (f.size() != 3) throw std::runtime_error("split needs three fractions");
    c.split = {f[0], f[1], f[2]};
  }
  if (auto v = doc.get("calibrate_on")) {
    if (*v == "train") {
      c.calibrate_on = CalibrationSplit::train;
    } else if (*v == "val") {
      c.calibrate_on = CalibrationSplit::val;
    } else if (*v == "train+val") {
      c.calibrate_on = CalibrationSplit::train_val;
    } else {
      throw std::runtime_error("calibrate_on must be train, val or train+val");
    }
  }
  if (auto v = doc.get("tradeoff_source")) c.tradeoff_source = *v;
  if (auto v = doc.get("grid_points")) c.grid_points = static_cast<std::size_t>(parse_int(*v));
  if (auto v = doc.get("delta_max")) c.delta_max = parse_double(*v);
  if (auto v = doc.get("sample_sizes")) c.sample_sizes = parse_sizes(*v);
  c.validate();
  return c;
}

KeyValueDoc ExperimentConfig::to_doc() const {
  KeyValueDoc d;
  d.add("kind", std::string(to_string(kind)));
  d.add("measure", std::string(to_string(measure)));
  d.add("cost", format_double(cost));
  d.add("deltas", format_doubles(deltas));
  d.add("reps", std::to_string(reps));
  d.add("seed", std::to_string(seed));
  d.add("randomize", randomize ? "true" : "false");
  d.add("groups", std::to_string(groups));
  d.add("redraw_population", redraw_population ? "true" : "false");
  d.add("n_train", std::to_string(n_train));
  d.add("n_test", std::to_string(n_test));
  d.add("n_eval", std::to_string(n_eval));
  d.add("train.learning_rate", format_double(training.learning_rate));
  d.add("train.epochs", std::to_string(training.epochs));
  d.add("train.batch_size", std::to_string(training.batch_size));
  d.add("train.l2", format_double(training.l2));
  d.add("train.standardize", training.standardize ? "true" : "false");
  d.add("train.group_mode", training.group_mode == GroupMode::joint ? "joint" : "per_group");
  const KeyValueDoc synth_doc = synth.to_doc();
  for (const auto& [k, v] : synth_doc.entries()) d.add(k, v);
  if (!data.empty()) d.add("data", data.string());
  if (!test_data.empty()) d.add("test_data", test_data.string());
  if (!schema.empty()) d.add("schema", schema.string());
  d.add("split", format_doubles({split[0], split[1], split[2]}));
  d.add("calibrate_on", std::string(calibration_name(calibrate_on)));
  d.add("tradeoff_source", tradeoff_source);
  d.add("grid_points", std::to_string(grid_points));
  d.add("delta_max", format_double(delta_max));
  std::vector<double> sizes(sample_sizes.begin(), sample_sizes.end());
  d.add("sample_sizes", format_doubles(sizes));
  return d;
}

void ExperimentConfig::validate() const {
  for (double d : deltas) {
    if (!(d >= 0.0)) throw std::invalid_argument("delta values must be >= 0");
  }
  if (reps < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (!(cost >= 0.0 && cost <= 1.0)) throw std::invalid_argument("cost must lie in [0, 1]");
  if (n_test < 1) throw std::invalid_argument("n_test must be >= 1");
  if (kind == ExperimentKind::synth_multiclass && groups < 2) throw std::invalid_argument("groups must be >= 2");
  if (kind != ExperimentKind::tradeoff && kind != ExperimentKind::synth_multiclass && deltas.empty()) {
    throw std::invalid_argument("no delta values given");
  }
  const bool tabular = kind == ExperimentKind::tabular ||
                       (kind == ExperimentKind::tradeoff && tradeoff_source == "tabular");
  if (tabular && (data.empty() || schema.empty())) throw std::invalid_argument("tabular runs need data and schema paths");
  if (kind == ExperimentKind::tradeoff && tradeoff_source != "synth" && tradeoff_source != "tabular") {
    throw std::invalid_argument("tradeoff_source must be synth or tabular");
  }
  if (kind == ExperimentKind::oracle_compare && sample_sizes.empty()) {
    throw std::invalid_argument("oracle-compare needs sample sizes");
  }
  synth.validate();
}

Report run_synth_binary(const ExperimentConfig& cfg, RunStats* stats) {
  cfg.validate();
  const Stopwatch clock;
  if (cfg.synth.group_count() != 2) throw std::invalid_argument("synth runs need a binary protected attribute");
  const std::size_t nd = cfg.deltas.size();

  struct Cellset {
    double t_hat, t_star, test_acc, test_disp, pop_acc, pop_disp, eval_acc, eval_disp, oracle_acc,
        oracle_disp, star, test_risk, oracle_risk;
  };
  std::vector<Cellset> out(cfg.reps * nd);
  parallel_for(cfg.reps, worker_count(cfg), [&](std::size_t rep) {
    const GaussianPopulation pop = population_for_rep(cfg, cfg.synth, rep);
    const Dataset train = sample(pop, cfg.n_train, derive_seed(cfg.seed, rep, kTrain));
    const Dataset test = sample(pop, cfg.n_test, derive_seed(cfg.seed, rep, kTest));
    const LogisticModel model = fit_logistic(train, training_for(cfg, rep));
    const GroupedScores gs_train = GroupedScores::from_model(model, train);
    const GroupedScores gs_test = GroupedScores::from_model(model, test);
    std::optional<GroupedScores> gs_eval;
    if (cfg.n_eval > 0) {
      gs_eval.emplace(GroupedScores::from_model(model, sample(pop, cfg.n_eval, derive_seed(cfg.seed, rep, kEval))));
    }
    const auto affine = affine_scores(model);
    const ScoreLaw law_hat = score_law(pop, affine);
    const double pop_star = star(pop, cfg.measure);
    for (std::size_t k = 0; k < nd; ++k) {
      const double delta = cfg.deltas[k];
      const SolveResult sol = solve(gs_train, constraint_for(cfg, delta), cfg.randomize);
      const EvalReport te = evaluate(sol.rule, gs_test, cfg.cost);
      const EvalReport pe = population_eval(pop, law_hat, sol.rule, cfg.cost);
      const OracleSolution orc = oracle_for(pop, cfg, delta);
      Cellset& c = out[rep * nd + k];
      c = {sol.t_hat, orc.t, te.accuracy, te.disparity(cfg.measure), pe.accuracy, pe.disparity(cfg.measure),
           kNaN, kNaN, orc.accuracy, orc.disparity, pop_star, te.cost_risk, orc.cost_risk};
      if (gs_eval) {
        const EvalReport ev = evaluate(sol.rule, *gs_eval, cfg.cost);
        c.eval_acc = ev.accuracy;
        c.eval_disp = ev.disparity(cfg.measure);
      }
    }
  });

  Report r;
  r.kind = "synth";
  r.version = 1;
  r.meta = common_meta(cfg);
  r.meta.emplace_back("n_train", std::to_string(cfg.n_train));
  r.meta.emplace_back("n_test", std::to_string(cfg.n_test));
  r.meta.emplace_back("n_eval", std::to_string(cfg.n_eval));

  ReportTable summary{"summary",
                      {"delta", "reps", "test_disparity_mean", "test_disparity_sd", "test_accuracy_mean",
                       "test_accuracy_sd", "oracle_accuracy_mean", "oracle_accuracy_sd", "population_accuracy_mean",
                       "population_accuracy_sd", "max_abs_population_gap", "eval_accuracy_mean",
                       "max_abs_eval_gap", "max_abs_test_gap"},
                      {}};
  ReportTable reps{"reps",
                   {"rep", "delta", "t_hat", "t_star", "star", "test_accuracy", "test_disparity", "test_cost_risk",
                    "population_accuracy", "population_disparity", "eval_accuracy", "eval_disparity",
                    "oracle_accuracy", "oracle_disparity", "oracle_cost_risk"},
                   {}};
  for (std::size_t k = 0; k < nd; ++k) {
    std::vector<double> disp, acc, oacc, pacc, pgap, eacc, egap, tgap;
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      const Cellset& c = out[rep * nd + k];
      disp.push_back(c.test_disp);
      acc.push_back(c.test_acc);
      oacc.push_back(c.oracle_acc);
      pacc.push_back(c.pop_acc);
      pgap.push_back(c.pop_acc - c.oracle_acc);
      tgap.push_back(c.test_acc - c.oracle_acc);
      if (!std::isnan(c.eval_acc)) {
        eacc.push_back(c.eval_acc);
        egap.push_back(c.eval_acc - c.oracle_acc);
      }
    }
    const MeanSd d = mean_sd(disp), a = mean_sd(acc), o = mean_sd(oacc), p = mean_sd(pacc), e = mean_sd(eacc);
    summary.add_row({cfg.deltas[k], static_cast<long long>(cfg.reps), d.mean, d.sd, a.mean, a.sd, o.mean, o.sd, p.mean,
                     p.sd, max_abs(pgap), e.mean, eacc.empty() ? kNaN : max_abs(egap), max_abs(tgap)});
  }
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    for (std::size_t k = 0; k < nd; ++k) {
      const Cellset& c = out[rep * nd + k];
      reps.add_row({static_cast<long long>(rep), cfg.deltas[k], c.t_hat, c.t_star, c.star, c.test_acc, c.test_disp,
                    c.test_risk, c.pop_acc, c.pop_disp, c.eval_acc, c.eval_disp, c.oracle_acc, c.oracle_disp,
                    c.oracle_risk});
    }
  }
  r.tables = {std::move(summary), std::move(reps)};
  clock.finish(stats);
  return r;
}

Report run_multiclass(const ExperimentConfig& cfg, RunStats* stats) {
  cfg.validate();
  const Stopwatch clock;
  const SynthSpec spec = multiclass_spec(cfg);
  const int groups = spec.group_count();
  const std::size_t n_train = cfg.n_train > 0 ? cfg.n_train : 10000 * static_cast<std::size_t>(groups);

  struct Row {
    double t_sum, train_gap, test_ddp, test_acc, pop_acc, pop_ddp, eval_acc, eval_ddp, oracle_acc;
    std::string diagnostic;
  };
  std::vector<Row> out(cfg.reps);
  parallel_for(cfg.reps, worker_count(cfg), [&](std::size_t rep) {
    const GaussianPopulation pop = population_for_rep(cfg, spec, rep);
    const Dataset train = sample(pop, n_train, derive_seed(cfg.seed, rep, kTrain));
    const Dataset test = sample(pop, cfg.n_test, derive_seed(cfg.seed, rep, kTest));
    const LogisticModel model = fit_logistic(train, training_for(cfg, rep));
    const GroupedScores gs_train = GroupedScores::from_model(model, train);
    const GroupedScores gs_test = GroupedScores::from_model(model, test);
    const MulticlassResult mc = solve_multiclass_dp(gs_train);
    const EvalReport te = evaluate(mc.rule, gs_test);
    const auto affine = affine_scores(model);
    const EvalReport pe = population_eval(pop, score_law(pop, affine), mc.rule);
    const MulticlassOracle orc = oracle_multiclass_dp(pop);
    Row& row = out[rep];
    row = {mc.t_sum, mc.max_gap, te.ddp_sum, te.accuracy, pe.accuracy, pe.ddp_sum, kNaN, kNaN, orc.accuracy,
           mc.diagnostic};
    if (cfg.n_eval > 0) {
      const Dataset ev = sample(pop, cfg.n_eval, derive_seed(cfg.seed, rep, kEval));
      const EvalReport er = evaluate(mc.rule, GroupedScores::from_model(model, ev));
      row.eval_acc = er.accuracy;
      row.eval_ddp = er.ddp_sum;
    }
  });

  Report r;
  r.kind = "multiclass";
  r.version = 1;
  r.meta = common_meta(cfg);
  r.meta.emplace_back("groups", std::to_string(groups));
  r.meta.emplace_back("n_train", std::to_string(n_train));
  r.meta.emplace_back("n_test", std::to_string(cfg.n_test));
  ReportTable summary{"summary",
                      {"groups", "reps", "test_ddp_mean", "test_ddp_sd", "test_accuracy_mean", "test_accuracy_sd",
                       "oracle_accuracy_mean", "oracle_accuracy_sd", "population_accuracy_mean",
                       "population_accuracy_sd", "max_abs_population_gap", "max_train_gap"},
                      {}};
  ReportTable reps{"reps",
                   {"rep", "t_sum", "train_max_gap", "test_ddp", "test_accuracy", "population_accuracy",
                    "population_ddp", "eval_accuracy", "eval_ddp", "oracle_accuracy", "diagnostic"},
                   {}};
  std::vector<double> ddp, acc, oacc, pacc, gap, tgap;
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    const Row& row = out[rep];
    ddp.push_back(row.test_ddp);
    acc.push_back(row.test_acc);
    oacc.push_back(row.oracle_acc);
    pacc.push_back(row.pop_acc);
    gap.push_back(row.pop_acc - row.oracle_acc);
    tgap.push_back(row.train_gap);
    reps.add_row({static_cast<long long>(rep), row.t_sum, row.train_gap, row.test_ddp, row.test_acc, row.pop_acc,
                  row.pop_ddp, row.eval_acc, row.eval_ddp, row.oracle_acc, row.diagnostic});
  }
  const MeanSd d = mean_sd(ddp), a = mean_sd(acc), o = mean_sd(oacc), p = mean_sd(pacc);
  summary.add_row({static_cast<long long>(groups), static_cast<long long>(cfg.reps), d.mean, d.sd, a.mean, a.sd,
                   o.mean, o.sd, p.mean, p.sd, max_abs(gap), max_abs(tgap)});
  r.tables = {std::move(summary), std::move(reps)};
  clock.finish(stats);
  return r;
}

Report run_tabular(const ExperimentConfig& cfg, RunStats* stats) {
  cfg.validate();
  const Stopwatch clock;
  const TabularSource src = load_tabular(cfg);
  const std::size_t nd = cfg.deltas.size();
  struct Cellset {
    double t_hat, calib_disp, test_acc, test_disp, test_ddp, test_deo;
  };
  std::vector<Cellset> out(cfg.reps * nd);
  std::vector<std::size_t> sizes(cfg.reps * 3);
  std::vector<std::string> warnings(cfg.reps);
  parallel_for(cfg.reps, worker_count(cfg), [&](std::size_t rep) {
    const TabularSplit sp = make_split(cfg, src, derive_seed(cfg.seed, rep, kSplit));
    sizes[rep * 3] = sp.train.size();
    sizes[rep * 3 + 1] = sp.calibration.size();
    sizes[rep * 3 + 2] = sp.test.size();
    for (const auto& w : sp.warnings) warnings[rep] += (warnings[rep].empty() ? "" : "; ") + w;
    const LogisticModel model = fit_logistic(sp.train, training_for(cfg, rep));
    const GroupedScores gs_cal = GroupedScores::from_model(model, sp.calibration);
    const GroupedScores gs_test = GroupedScores::from_model(model, sp.test);
    for (std::size_t k = 0; k < nd; ++k) {
      const SolveResult sol = solve(gs_cal, constraint_for(cfg, cfg.deltas[k]), cfg.randomize);
      const EvalReport te = evaluate(sol.rule, gs_test, cfg.cost);
      out[rep * nd + k] = {sol.t_hat, sol.achieved_disparity, te.accuracy, te.disparity(cfg.measure), te.ddp, te.deo};
    }
  });

  Report r;
  r.kind = "tabular";
  r.version = 1;
  r.meta = common_meta(cfg);
  r.meta.emplace_back("data", cfg.data.filename().string());
  r.meta.emplace_back("calibrate_on", std::string(calibration_name(cfg.calibrate_on)));
  r.meta.emplace_back("plug_in_rates", "solving split");
  r.meta.emplace_back("train_rows", std::to_string(sizes[0]));
  r.meta.emplace_back("calibration_rows", std::to_string(sizes[1]));
  r.meta.emplace_back("test_rows", std::to_string(sizes[2]));
  if (!warnings[0].empty()) r.meta.emplace_back("warnings", warnings[0]);

  ReportTable summary{"summary",
                      {"delta", "reps", "test_disparity_mean", "test_disparity_sd", "test_accuracy_mean",
                       "test_accuracy_sd", "calibration_disparity_mean"},
                      {}};
  ReportTable reps{"reps",
                   {"rep", "delta", "t_hat", "calibration_disparity", "test_accuracy", "test_disparity", "test_ddp",
                    "test_deo"},
                   {}};
  for (std::size_t k = 0; k < nd; ++k) {
    std::vector<double> disp, acc, cal;
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      const Cellset& c = out[rep * nd + k];
      disp.push_back(c.test_disp);
      acc.push_back(c.test_acc);
      cal.push_back(c.calib_disp);
    }
    const MeanSd d = mean_sd(disp), a = mean_sd(acc), c = mean_sd(cal);
    summary.add_row({cfg.deltas[k], static_cast<long long>(cfg.reps), d.mean, d.sd, a.mean, a.sd, c.mean});
  }
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    for (std::size_t k = 0; k < nd; ++k) {
      const Cellset& c = out[rep * nd + k];
      reps.add_row({static_cast<long long>(rep), cfg.deltas[k], c.t_hat, c.calib_disp, c.test_acc, c.test_disp,
                    c.test_ddp, c.test_deo});
    }
  }
  r.tables = {std::move(summary), std::move(reps)};
  clock.finish(stats);
  return r;
}

Report run_tradeoff(const ExperimentConfig& cfg, RunStats* stats) {
  cfg.validate();
  const Stopwatch clock;
  Dataset train, calibration, test;
  Report r;
  r.kind = "tradeoff";
  r.version = 1;
  r.meta = common_meta(cfg);
  r.meta.emplace_back("source", cfg.tradeoff_source);
  if (cfg.tradeoff_source == "tabular") {
    const TabularSource src = load_tabular(cfg);
    TabularSplit sp = make_split(cfg, src, derive_seed(cfg.seed, 0, kSplit));
    train = std::move(sp.train);
    calibration = std::move(sp.calibration);
    test = std::move(sp.test);
    r.meta.emplace_back("calibrate_on", std::string(calibration_name(cfg.calibrate_on)));
  } else {
    const GaussianPopulation pop = population_for_rep(cfg, cfg.synth, 0);
    train = sample(pop, cfg.n_train, derive_seed(cfg.seed, 0, kTrain));
    test = sample(pop, cfg.n_test, derive_seed(cfg.seed, 0, kTest));
    calibration = train;
  }
  const LogisticModel model = fit_logistic(train, training_for(cfg, 0));
  const GroupedScores gs_cal = GroupedScores::from_model(model, calibration);
  const GroupedScores gs_test = GroupedScores::from_model(model, test);

  double initial = 0.0;
  if (cfg.measure == Measure::DP && cfg.cost != 0.5) {
    initial = DisparityFunction::cost_sensitive(gs_cal, cfg.cost)(0.0);
  } else {
    initial = DisparityFunction(gs_cal, cfg.measure)(0.0);
  }
  const std::vector<double> grid = tradeoff_grid(cfg, initial);
  std::vector<SolveResult> sols(grid.size());
  std::vector<EvalReport> evals(grid.size());
  parallel_for(grid.size(), worker_count(cfg), [&](std::size_t k) {
    sols[k] = solve(gs_cal, constraint_for(cfg, grid[k]), cfg.randomize);
    evals[k] = evaluate(sols[k].rule, gs_test, cfg.cost);
  });

  ReportTable curve{"curve",
                    {"delta", "t_hat", "solve_accuracy", "solve_plugin_accuracy", "solve_disparity", "test_accuracy",
                     "test_disparity", "test_cost_risk"},
                    {}};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    curve.add_row({grid[k], sols[k].t_hat, sols[k].accuracy, sols[k].plugin_accuracy, sols[k].achieved_disparity,
                   evals[k].accuracy, evals[k].disparity(cfg.measure), evals[k].cost_risk});
  }
  r.meta.emplace_back("initial_disparity", format_double(initial));
  r.meta.emplace_back("points", std::to_string(grid.size()));
  r.tables = {std::move(curve)};
  clock.finish(stats);
  return r;
}

Report run_oracle_compare(const ExperimentConfig& cfg, RunStats* stats) {
  cfg.validate();
  const Stopwatch clock;
  if (cfg.synth.group_count() != 2) throw std::invalid_argument("oracle-compare needs a binary protected attribute");
  const GaussianPopulation pop = draw_population(cfg.synth);
  const std::size_t nd = cfg.deltas.size();
  const std::size_t ns = cfg.sample_sizes.size();
  std::vector<OracleSolution> oracle;
  for (double d : cfg.deltas) oracle.push_back(oracle_for(pop, cfg, d));

  struct Cellset {
    double t_hat, t_gap, q0_gap, q1_gap, pop_acc, acc_gap;
  };
  std::vector<Cellset> out(ns * cfg.reps * nd);
  parallel_for(ns * cfg.reps, worker_count(cfg), [&](std::size_t task) {
    const std::size_t si = task / cfg.reps;
    const Dataset train = sample(pop, cfg.sample_sizes[si], derive_seed(cfg.seed, task, kTrain));
    const LogisticModel model = fit_logistic(train, training_for(cfg, task));
    const GroupedScores gs = GroupedScores::from_model(model, train);
    const ScoreLaw law_hat = score_law(pop, affine_scores(model));
    for (std::size_t k = 0; k < nd; ++k) {
      const SolveResult sol = solve(gs, constraint_for(cfg, cfg.deltas[k]), cfg.randomize);
      const EvalReport pe = population_eval(pop, law_hat, sol.rule, cfg.cost);
      const OracleSolution& o = oracle[k];
      out[task * nd + k] = {sol.t_hat,
                            std::abs(sol.t_hat - o.t),
                            std::abs(sol.rule.thresholds[0] - o.rule.thresholds[0]),
                            std::abs(sol.rule.thresholds[1] - o.rule.thresholds[1]),
                            pe.accuracy,
                            pe.accuracy - o.accuracy};
    }
  });

  Report r;
  r.kind = "oracle-compare";
  r.version = 1;
  r.meta = common_meta(cfg);
  r.meta.emplace_back("population_seed", std::to_string(cfg.synth.seed));
  ReportTable summary{"summary",
                      {"n", "delta", "t_star", "abs_t_gap_mean", "abs_t_gap_sd", "abs_q0_gap_mean", "abs_q1_gap_mean",
                       "accuracy_gap_mean", "accuracy_gap_sd"},
                      {}};
  ReportTable reps{"reps",
                   {"n", "rep", "delta", "t_hat", "t_star", "abs_t_gap", "abs_q0_gap", "abs_q1_gap",
                    "population_accuracy", "oracle_accuracy", "accuracy_gap"},
                   {}};
  for (std::size_t si = 0; si < ns; ++si) {
    for (std::size_t k = 0; k < nd; ++k) {
      std::vector<double> tg, q0, q1, ag;
      for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
        const Cellset& c = out[(si * cfg.reps + rep) * nd + k];
        tg.push_back(c.t_gap);
        q0.push_back(c.q0_gap);
        q1.push_back(c.q1_gap);
        ag.push_back(c.acc_gap);
      }
      const MeanSd t = mean_sd(tg), a = mean_sd(ag);
      summary.add_row({static_cast<long long>(cfg.sample_sizes[si]), cfg.deltas[k], oracle[k].t, t.mean, t.sd,
                       mean_sd(q0).mean, mean_sd(q1).mean, a.mean, a.sd});
    }
  }
  for (std::size_t si = 0; si < ns; ++si) {
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      for (std::size_t k = 0; k < nd; ++k) {
        const Cellset& c = out[(si * cfg.reps + rep) * nd + k];
        reps.add_row({static_cast<long long>(cfg.sample_sizes[si]), static_cast<long long>(rep), cfg.deltas[k],
                      c.t_hat, oracle[k].t, c.t_gap, c.q0_gap, c.q1_gap, c.pop_acc, oracle[k].accuracy, c.acc_gap});
      }
    }
  }
  r.tables = {std::move(summary), std::move(reps)};
  clock.finish(stats);
  return r;
}

Report run_experiment(const ExperimentConfig& cfg, RunStats* stats) {
  switch (cfg.kind) {
    case ExperimentKind::synth_binary: return run_synth_binary(cfg, stats);
    case ExperimentKind::synth_multiclass: return run_multiclass(cfg, stats);
    case ExperimentKind::tabular: return run_tabular(cfg, stats);
    case ExperimentKind::tradeoff: return run_tradeoff(cfg, stats);
    case ExperimentKind::oracle_compare: return run_oracle_compare(cfg, stats);
  }
  throw std::invalid_argument("unknown experiment kind");
}

}  // namespace fairbayes
