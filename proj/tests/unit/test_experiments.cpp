#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>

#include "fairbayes/experiments.hpp"
#include "fairbayes/tabular_ingest.hpp"

using namespace fairbayes;

namespace {

ExperimentConfig small(ExperimentKind kind) {
  ExperimentConfig c = ExperimentConfig::defaults(kind);
  c.reps = 2;
  c.n_train = 2000;
  c.n_test = 1000;
  c.training.epochs = 60;
  c.threads = 1;
  return c;
}

std::vector<double> column(const ReportTable& t, std::string_view name) {
  std::vector<double> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) out.push_back(t.number(i, name));
  return out;
}

}  // namespace

TEST(ExperimentConfig, KindNames) {
  EXPECT_EQ(parse_experiment_kind("synth"), ExperimentKind::synth_binary);
  EXPECT_EQ(parse_experiment_kind("synth-binary"), ExperimentKind::synth_binary);
  EXPECT_EQ(parse_experiment_kind("synth-multiclass"), ExperimentKind::synth_multiclass);
  EXPECT_EQ(parse_experiment_kind("oracle-compare"), ExperimentKind::oracle_compare);
  EXPECT_THROW(parse_experiment_kind("bogus"), std::invalid_argument);
}

TEST(ExperimentConfig, DocumentRoundTrip) {
  for (ExperimentKind k : {ExperimentKind::synth_binary, ExperimentKind::synth_multiclass, ExperimentKind::tradeoff,
                           ExperimentKind::oracle_compare}) {
    ExperimentConfig c = ExperimentConfig::defaults(k);
    c.seed = 42;
    c.deltas = {0.05, 0.15};
    c.training.learning_rate = 0.25;
    const KeyValueDoc doc = c.to_doc();
    const ExperimentConfig back = ExperimentConfig::from_doc(doc, ExperimentKind::synth_binary);
    EXPECT_EQ(back.to_doc().to_string(), doc.to_string());
  }
}

TEST(ExperimentConfig, OverridesAndValidation) {
  const auto doc = KeyValueDoc::parse("kind = synth\nmeasure = eo\ndeltas = 0, 0.04\nreps = 3\ntrain.epochs = 10\n");
  const ExperimentConfig c = ExperimentConfig::from_doc(doc, ExperimentKind::tabular);
  EXPECT_EQ(c.kind, ExperimentKind::synth_binary);
  EXPECT_EQ(c.measure, Measure::EO);
  EXPECT_EQ(c.deltas, (std::vector<double>{0.0, 0.04}));
  EXPECT_EQ(c.reps, 3u);
  EXPECT_EQ(c.training.epochs, 10u);

  ExperimentConfig bad = ExperimentConfig::defaults(ExperimentKind::synth_binary);
  bad.deltas = {-0.1};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ExperimentConfig::defaults(ExperimentKind::synth_binary);
  bad.reps = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::from_doc(KeyValueDoc::parse("reps = many\n"), ExperimentKind::synth_binary),
               std::exception);
}

TEST(ParallelFor, CoversEveryIndexAndRethrows) {
  std::vector<std::atomic<int>> hits(97);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(RunSynth, DeterministicAcrossThreadCounts) {
  ExperimentConfig c = small(ExperimentKind::synth_binary);
  c.deltas = {0.0, 0.1};
  const std::string one = render_csv(run_synth_binary(c));
  const std::string again = render_csv(run_synth_binary(c));
  c.threads = 3;
  const std::string three = render_csv(run_synth_binary(c));
  EXPECT_EQ(one, again);
  EXPECT_EQ(one, three);
}

TEST(RunSynth, VacuousDeltaLeavesRuleUnconstrained) {
  ExperimentConfig c = small(ExperimentKind::synth_binary);
  c.deltas = {1.0};
  const Report r = run_synth_binary(c);
  const ReportTable& reps = r.table("reps");
  ASSERT_EQ(reps.rows.size(), 2u);
  for (double t : column(reps, "t_hat")) EXPECT_EQ(t, 0.0);
  for (double t : column(reps, "t_star")) EXPECT_EQ(t, 0.0);
}

TEST(RunTradeoff, SingleFitSortedAndMonotone) {
  ExperimentConfig c = small(ExperimentKind::tradeoff);
  c.grid_points = 50;
  RunStats stats;
  const Report r = run_tradeoff(c, &stats);
  EXPECT_EQ(stats.fits, 1u);
  const ReportTable& curve = r.table("curve");
  ASSERT_EQ(curve.rows.size(), 50u);
  const auto delta = column(curve, "delta");
  const auto acc = column(curve, "solve_plugin_accuracy");
  EXPECT_TRUE(std::is_sorted(delta.begin(), delta.end()));
  EXPECT_EQ(delta.front(), 0.0);
  for (std::size_t i = 1; i < acc.size(); ++i) EXPECT_GE(acc[i], acc[i - 1] - 1e-12);
  // One training row per atom at most: |DDP| at delta = 0 stays within 1/min n_a.
  EXPECT_LE(std::abs(curve.number(0, "solve_disparity")), 1.0 / (0.3 * 2000 * 0.8));
}

TEST(RunOracleCompare, GapShrinksWithSampleSize) {
  ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::oracle_compare);
  c.reps = 3;
  c.deltas = {0.2};
  c.sample_sizes = {1000, 50000};
  c.training.epochs = 100;
  c.threads = 1;
  const Report r = run_oracle_compare(c);
  const ReportTable& s = r.table("summary");
  ASSERT_EQ(s.rows.size(), 2u);
  EXPECT_LT(s.number(1, "abs_t_gap_mean"), s.number(0, "abs_t_gap_mean"));
  EXPECT_EQ(render_csv(r), render_csv(run_oracle_compare(c)));
}

TEST(RunMulticlass, ProducesSummedGap) {
  ExperimentConfig c = small(ExperimentKind::synth_multiclass);
  c.groups = 3;
  c.n_train = 6000;
  c.training.epochs = 100;
  const Report r = run_multiclass(c);
  const ReportTable& s = r.table("summary");
  ASSERT_EQ(s.rows.size(), 1u);
  EXPECT_GE(s.number(0, "test_ddp_mean"), 0.0);
  EXPECT_LE(s.number(0, "test_ddp_mean"), 0.2);
  EXPECT_EQ(r.table("reps").rows.size(), 2u);
}

TEST(RunTabular, SyntheticCsvRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "fairbayes_tabular_run";
  std::filesystem::create_directories(dir);
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(3));
  write_csv(sample(pop, 3000, 1), dir / "data.csv");
  ColumnSchema::synthetic(pop.dimension()).save(dir / "data.schema");
  ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::tabular);
  c.data = dir / "data.csv";
  c.schema = dir / "data.schema";
  c.reps = 2;
  c.training.epochs = 60;
  c.threads = 1;
  const Report r = run_tabular(c);
  std::filesystem::remove_all(dir);
  const ReportTable& s = r.table("summary");
  EXPECT_EQ(s.rows.size(), c.deltas.size());
  EXPECT_EQ(r.table("reps").rows.size(), c.deltas.size() * 2);
}

TEST(RunTabular, MissingDataFails) {
  ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::tabular);
  c.data = "/nonexistent/adult.data";
  c.schema = "/nonexistent/adult.schema";
  EXPECT_THROW(run_tabular(c), std::exception);
}
