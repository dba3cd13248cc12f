#include "cli.hpp"

#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fairbayes/experiments.hpp"
#include "fairbayes/report.hpp"
#include "fairbayes/synthetic_gen.hpp"
#include "fairbayes/tabular_ingest.hpp"

namespace fairbayes::cli {

namespace {

namespace fs = std::filesystem;

void emit_error(std::ostream& err, std::string_view kind, std::string_view message, std::string_view command) {
  nlohmann::ordered_json j;
  j["error"] = {{"kind", kind}, {"message", message}, {"command", command}};
  err << j.dump() << '\n';
}

// Flags shared by every experiment subcommand; unset ones leave the config alone.
struct RunFlags {
  std::string config;
  std::optional<std::string> deltas;
  std::optional<std::string> measure;
  std::optional<double> cost;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> n_train;
  std::optional<std::size_t> n_test;
  std::optional<std::size_t> n_eval;
  std::optional<int> groups;
  std::optional<std::string> data;
  std::optional<std::string> test_data;
  std::optional<std::string> schema;
  std::optional<std::string> calibrate_on;
  std::optional<std::string> source;
  std::optional<std::size_t> grid_points;
  std::optional<double> delta_max;
  std::optional<std::string> sample_sizes;
  bool randomize = false;
  bool fixed_population = false;
  bool dump_config = false;
  bool stats = false;
  std::vector<std::string> sets;
  std::string out;
  std::string format = "table";
};

void add_run_flags(CLI::App* sub, RunFlags& f) {
  sub->add_option("--config", f.config, "key = value experiment config file");
  sub->add_option("--delta", f.deltas, "comma-separated disparity levels");
  sub->add_option("--measure", f.measure, "dp, eo, pe or oa")->check(CLI::IsMember({"dp", "eo", "pe", "oa", "DP", "EO", "PE", "OA"}));
  sub->add_option("--cost", f.cost, "misclassification cost c (dp only)");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--reps", f.reps, "repetitions");
  sub->add_option("--threads", f.threads, "worker threads (0: all cores)");
  sub->add_option("--n-train", f.n_train, "training sample size");
  sub->add_option("--n-test", f.n_test, "test sample size");
  sub->add_option("--n-eval", f.n_eval, "extra held-out sample size");
  sub->add_option("--groups", f.groups, "number of protected groups (multiclass)");
  sub->add_option("--data", f.data, "CSV file");
  sub->add_option("--test-data", f.test_data, "separate test CSV file");
  sub->add_option("--schema", f.schema, "column schema file");
  sub->add_option("--calibrate-on", f.calibrate_on, "train, val or train+val");
  sub->add_option("--source", f.source, "tradeoff source: synth or tabular");
  sub->add_option("--grid-points", f.grid_points, "automatic delta grid size");
  sub->add_option("--delta-max", f.delta_max, "largest delta of the automatic grid");
  sub->add_option("--sample-sizes", f.sample_sizes, "comma-separated sample sizes");
  sub->add_flag("--randomize", f.randomize, "randomize at the boundary to hit delta exactly");
  sub->add_flag("--fixed-population", f.fixed_population, "reuse synth.seed's population in every repetition");
  sub->add_option("--set", f.sets, "extra key=value config override")->take_all();
  sub->add_flag("--dump-config", f.dump_config, "print the resolved config and exit");
  sub->add_flag("--stats", f.stats, "print wall time and fit count to stderr");
  sub->add_option("--out", f.out, "write the report here instead of stdout");
  sub->add_option("--format", f.format, "csv, json or table")->check(CLI::IsMember({"csv", "json", "table"}));
}

template <typename T>
void put(KeyValueDoc& doc, const std::string& key, const std::optional<T>& v) {
  if (!v) return;
  if constexpr (std::is_same_v<T, std::string>) {
    doc.set(key, *v);
  } else if constexpr (std::is_floating_point_v<T>) {
    doc.set(key, format_double(*v));
  } else {
    doc.set(key, std::to_string(*v));
  }
}

// Relative data paths that do not exist are looked up in $FAIRBAYES_DATA_DIR.
fs::path resolve_data(const fs::path& p) {
  if (p.empty() || p.is_absolute() || fs::exists(p)) return p;
  if (const auto dir = data_dir_from_env()) {
    const fs::path candidate = *dir / p;
    if (fs::exists(candidate)) return candidate;
  }
  return p;
}

ExperimentConfig resolve_config(ExperimentKind kind, const RunFlags& f) {
  KeyValueDoc doc;
  fs::path base;
  if (!f.config.empty()) {
    doc = KeyValueDoc::read_file(f.config);
    base = fs::path(f.config).parent_path();
  }
  doc.set("kind", std::string(to_string(kind)));
  put(doc, "deltas", f.deltas);
  put(doc, "measure", f.measure);
  put(doc, "cost", f.cost);
  put(doc, "seed", f.seed);
  put(doc, "reps", f.reps);
  put(doc, "threads", f.threads);
  put(doc, "n_train", f.n_train);
  put(doc, "n_test", f.n_test);
  put(doc, "n_eval", f.n_eval);
  put(doc, "groups", f.groups);
  put(doc, "calibrate_on", f.calibrate_on);
  put(doc, "tradeoff_source", f.source);
  put(doc, "grid_points", f.grid_points);
  put(doc, "delta_max", f.delta_max);
  put(doc, "sample_sizes", f.sample_sizes);
  if (f.randomize) doc.set("randomize", "true");
  if (f.fixed_population) doc.set("redraw_population", "false");
  for (const std::string& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
    doc.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  // Paths in a config file are relative to that file; paths on the command line to the cwd.
  for (const char* key : {"data", "test_data", "schema"}) {
    if (const auto v = doc.get(key); v && !fs::path(*v).is_absolute() && !base.empty()) {
      const fs::path rel = base / *v;
      if (fs::exists(rel)) doc.set(key, rel.string());
    }
  }
  put(doc, "data", f.data);
  put(doc, "test_data", f.test_data);
  put(doc, "schema", f.schema);
  ExperimentConfig cfg = ExperimentConfig::from_doc(doc, kind);
  cfg.data = resolve_data(cfg.data);
  cfg.test_data = resolve_data(cfg.test_data);
  cfg.schema = resolve_data(cfg.schema);
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

int run_experiment_command(ExperimentKind kind, const RunFlags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = resolve_config(kind, f);
  if (f.dump_config) {
    out << cfg.to_doc().to_string();
    return 0;
  }
  RunStats stats;
  const Report report = run_experiment(cfg, &stats);
  const ReportFormat format = parse_report_format(f.format);
  if (f.out.empty()) {
    out << render(report, format);
  } else {
    write_text(f.out, render(report, format));
    if (format != ReportFormat::table) out << render_table(report);
  }
  if (f.stats) {
    nlohmann::ordered_json j;
    j["stats"] = {{"command", to_string(kind)}, {"seconds", stats.seconds}, {"fits", stats.fits}};
    err << j.dump() << '\n';
  }
  return 0;
}

struct GenerateFlags {
  std::size_t n = 10000;
  std::uint64_t seed = 1;
  std::uint64_t population_seed = 0;
  int groups = 2;
  std::string config;
  std::string out;
  std::string schema_out;
  std::string population_out;
};

int run_generate(const GenerateFlags& g, std::ostream& out) {
  SynthSpec spec = g.groups == 2 ? SynthSpec::binary_default(g.population_seed)
                                 : SynthSpec::multiclass_default(g.groups, g.population_seed);
  if (!g.config.empty()) spec = SynthSpec::from_doc(KeyValueDoc::read_file(g.config), spec);
  const GaussianPopulation pop = draw_population(spec);
  const Dataset data = sample(pop, g.n, g.seed);
  write_csv(data, g.out);
  if (!g.schema_out.empty()) ColumnSchema::synthetic(spec.dimension).save(g.schema_out);
  if (!g.population_out.empty()) pop.save(g.population_out);
  out << "wrote " << data.size() << " rows to " << g.out << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Group-threshold fair classification experiments", "fairbayes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "fairbayes 0.1.0");

  struct Entry {
    const char* name;
    const char* help;
    ExperimentKind kind;
  };
  const Entry entries[] = {
      {"synth", "binary synthetic benchmark against the exact oracle", ExperimentKind::synth_binary},
      {"multiclass", "multi-group demographic parity benchmark", ExperimentKind::synth_multiclass},
      {"tabular", "calibrate thresholds on a CSV dataset", ExperimentKind::tabular},
      {"tradeoff", "accuracy/disparity curve from a single fit", ExperimentKind::tradeoff},
      {"oracle-compare", "empirical thresholds against population thresholds", ExperimentKind::oracle_compare},
  };
  std::map<CLI::App*, std::pair<ExperimentKind, RunFlags>> runs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    auto& slot = runs[sub];
    slot.first = e.kind;
    add_run_flags(sub, slot.second);
  }

  GenerateFlags gen;
  CLI::App* generate = app.add_subcommand("generate", "write a synthetic sample as CSV");
  generate->add_option("--n", gen.n, "rows");
  generate->add_option("--seed", gen.seed, "sampling seed");
  generate->add_option("--population-seed", gen.population_seed, "population seed");
  generate->add_option("--groups", gen.groups, "protected groups")->check(CLI::Range(2, 1000));
  generate->add_option("--config", gen.config, "file with synth.* keys");
  generate->add_option("--out", gen.out, "CSV path")->required();
  generate->add_option("--schema-out", gen.schema_out, "also write the matching column schema");
  generate->add_option("--population-out", gen.population_out, "also write the population parameters");

  std::string command;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what(), argc > 1 ? argv[1] : "");
    return 2;
  }

  try {
    if (generate->parsed()) {
      command = "generate";
      return run_generate(gen, out);
    }
    for (auto& [sub, slot] : runs) {
      if (sub->parsed()) {
        command = sub->get_name();
        return run_experiment_command(slot.first, slot.second, out, err);
      }
    }
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what(), command);
    return 2;
  } catch (const std::invalid_argument& e) {
    emit_error(err, "invalid_argument", e.what(), command);
    return 1;
  } catch (const std::exception& e) {
    emit_error(err, "runtime_error", e.what(), command);
    return 1;
  }
  emit_error(err, "usage", "no subcommand", "");
  return 2;
}

}  // namespace fairbayes::cli
