#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fairbayes/core_data.hpp"
#include "fairbayes/kv_config.hpp"
#include "fairbayes/report.hpp"
#include "fairbayes/score_models.hpp"
#include "fairbayes/synthetic_gen.hpp"

namespace fairbayes {

enum class ExperimentKind { synth_binary, synth_multiclass, tabular, tradeoff, oracle_compare };

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view s);

enum class CalibrationSplit { train, val, train_val };

/// Everything a run needs. Loaded from a key-value file (keys as the field
/// names below, `train.*` for TrainingConfig, `synth.*` for SynthSpec) and
/// then overridden by command-line flags.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::synth_binary;
  Measure measure = Measure::DP;
  double cost = 0.5;
  std::vector<double> deltas{0.0, 0.1, 0.2, 0.3};
  std::size_t reps = 20;
  std::uint64_t seed = 1;
  bool randomize = false;
  std::size_t threads = 0;  ///< 0: hardware concurrency

  SynthSpec synth = SynthSpec::binary_default();
  int groups = 3;  ///< multiclass group count
  /// Redraw the population per repetition from a derived seed (otherwise
  /// every repetition uses synth.seed).
  bool redraw_population = true;
  std::size_t n_train = 20000;  ///< multiclass: 0 means 10000 |A|
  std::size_t n_test = 5000;
  /// Size of an extra held-out sample for low-noise accuracy (0: none).
  std::size_t n_eval = 0;
  TrainingConfig training;

  std::filesystem::path data;
  std::filesystem::path test_data;
  std::filesystem::path schema;
  /// Train/val/test fractions; with test_data the test fraction must be 0.
  std::array<double, 3> split{0.64, 0.16, 0.2};
  CalibrationSplit calibrate_on = CalibrationSplit::val;
  /// Source of a tradeoff sweep: "synth" or "tabular".
  std::string tradeoff_source = "synth";
  std::size_t grid_points = 50;
  /// Largest delta of the automatic grid; 0 means |D(0)| on the solving sample.
  double delta_max = 0.0;
  std::vector<std::size_t> sample_sizes{1000, 10000, 100000};

  static ExperimentConfig defaults(ExperimentKind kind);
  /// Starts from defaults(kind in doc, or `fallback_kind`).
  static ExperimentConfig from_doc(const KeyValueDoc& doc, ExperimentKind fallback_kind);
  KeyValueDoc to_doc() const;
  void validate() const;
};

/// Timing and bookkeeping reported outside the deterministic report.
struct RunStats {
  double seconds = 0.0;
  std::uint64_t fits = 0;
};

Report run_synth_binary(const ExperimentConfig& cfg, RunStats* stats = nullptr);
Report run_multiclass(const ExperimentConfig& cfg, RunStats* stats = nullptr);
Report run_tabular(const ExperimentConfig& cfg, RunStats* stats = nullptr);
Report run_tradeoff(const ExperimentConfig& cfg, RunStats* stats = nullptr);
Report run_oracle_compare(const ExperimentConfig& cfg, RunStats* stats = nullptr);
Report run_experiment(const ExperimentConfig& cfg, RunStats* stats = nullptr);

/// Runs task(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by a task is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task);

}  // namespace fairbayes
