#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fairbayes/score_models.hpp"
#include "fairbayes/synthetic_gen.hpp"
#include "oracles.hpp"

using namespace fairbayes;
namespace oracle = fairbayes::testing;

TEST(SynthSpec, BinaryDefaults) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(1));
  EXPECT_EQ(pop.dimension(), 10u);
  EXPECT_EQ(pop.sigma, 1.0);
  EXPECT_EQ(pop.p, (std::vector<double>{0.3, 0.7}));
  EXPECT_EQ(pop.p_y, (std::vector<double>{0.4, 0.7}));
  for (const auto& pair : pop.mu) {
    for (const auto& m : pair) {
      for (double v : m) {
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
      }
    }
  }
}

TEST(SynthSpec, MulticlassGroupProbabilities) {
  const SynthSpec s = SynthSpec::multiclass_default(3);
  double total = 0.0;
  for (int a = 1; a <= 3; ++a) total += std::sqrt(a);
  for (int a = 1; a <= 3; ++a) EXPECT_NEAR(s.group_probs[a - 1], std::sqrt(a) / total, 1e-15);
  EXPECT_NEAR(s.group_probs[0], 0.2412, 1e-4);
  EXPECT_NEAR(s.group_probs[1], 0.3411, 1e-4);
  EXPECT_NEAR(s.group_probs[2], 0.4177, 1e-4);

  const GaussianPopulation pop = draw_population(SynthSpec::multiclass_default(4, 2));
  EXPECT_EQ(pop.dimension(), 4u);
  EXPECT_EQ(pop.sigma, 2.0);
  for (int a = 0; a < 4; ++a) {
    for (int y = 0; y < 2; ++y) {
      for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_EQ(pop.mu[a][y][j], j == static_cast<std::size_t>(a) ? 2.0 * y - 1.0 : 0.0);
      }
    }
    EXPECT_GT(pop.p_y[a], 0.0);
    EXPECT_LT(pop.p_y[a], 1.0);
  }
  EXPECT_NE(draw_population(SynthSpec::multiclass_default(4, 3)).p_y, pop.p_y);
}

TEST(SynthSpec, Validation) {
  SynthSpec s = SynthSpec::binary_default();
  s.dimension = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = SynthSpec::binary_default();
  s.sigma = -1.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = SynthSpec::binary_default();
  s.group_probs = {0.5, 0.6};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  EXPECT_THROW(SynthSpec::multiclass_default(1), std::invalid_argument);
}

TEST(SynthSpec, DocumentOverridesBase) {
  const SynthSpec base = SynthSpec::binary_default(3);
  const SynthSpec same = SynthSpec::from_doc(base.to_doc(), SynthSpec{});
  EXPECT_EQ(same.dimension, base.dimension);
  EXPECT_EQ(same.group_probs, base.group_probs);
  EXPECT_EQ(same.seed, base.seed);
  KeyValueDoc doc;
  doc.add("synth.dimension", "4");
  doc.add("synth.seed", "99");
  const SynthSpec s = SynthSpec::from_doc(doc, base);
  EXPECT_EQ(s.dimension, 4u);
  EXPECT_EQ(s.seed, 99u);
  EXPECT_EQ(s.positive_rates, base.positive_rates);
}

TEST(DrawPopulation, Deterministic) {
  const GaussianPopulation a = draw_population(SynthSpec::binary_default(5));
  const GaussianPopulation b = draw_population(SynthSpec::binary_default(5));
  const GaussianPopulation c = draw_population(SynthSpec::binary_default(6));
  EXPECT_EQ(a.mu, b.mu);
  EXPECT_NE(a.mu, c.mu);
}

TEST(Sample, SingleRowAndZeroRows) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(1));
  const Dataset d = sample(pop, 1, 3);
  EXPECT_EQ(d.size(), 1u);
  EXPECT_EQ(d.dimension(), 10u);
  EXPECT_THROW(sample(pop, 0, 3), std::invalid_argument);
}

TEST(Sample, GroupShareConcentrates) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(1));
  const Dataset d = sample(pop, 20000, 4);
  const GroupStats st = group_stats(d);
  EXPECT_NEAR(st.p_hat_a(1), 0.7, 0.02);
  EXPECT_NEAR(st.p_hat_Ya(1), 0.7, 4.0 * std::sqrt(0.21 / st.n_a[1]));
  EXPECT_NEAR(st.p_hat_Ya(0), 0.4, 4.0 * std::sqrt(0.24 / st.n_a[0]));
}

TEST(Sample, StratumMeansConcentrate) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(2));
  const Dataset d = sample(pop, 20000, 5);
  for (int a = 0; a < 2; ++a) {
    for (int y = 0; y < 2; ++y) {
      std::vector<double> sum(d.dimension(), 0.0);
      std::size_t count = 0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.group()[i] != a || d.label()[i] != y) continue;
        ++count;
        const auto row = d.features().row(i);
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += row[j];
      }
      ASSERT_GT(count, 0u);
      for (std::size_t j = 0; j < sum.size(); ++j) {
        EXPECT_NEAR(sum[j] / count, pop.mu[a][y][j], 4.0 * pop.sigma / std::sqrt(count));
      }
    }
  }
}

TEST(Sample, ByteIdenticalCsvForSameSeed) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(3));
  const auto dir = std::filesystem::temp_directory_path();
  const auto p1 = dir / "fairbayes_sample_a.csv", p2 = dir / "fairbayes_sample_b.csv";
  write_csv(sample(pop, 300, 9), p1);
  write_csv(sample(pop, 300, 9), p2);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = slurp(p1), b = slurp(p2);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("x0,x1,x2,x3,x4,x5,x6,x7,x8,x9,group,label\n", 0), 0u);
}

TEST(Sample, FittedScoresApproachEtaWithMoreData) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(8));
  const Dataset test = sample(pop, 4000, 77);
  std::vector<double> mae;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    TrainingConfig cfg;
    cfg.group_mode = GroupMode::per_group;
    const auto s = predict_scores(fit_logistic(sample(pop, n, 11), cfg), test);
    double e = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      e += std::abs(s[i] - oracle::eta_direct(pop, test.features().row(i), test.group()[i]));
    }
    mae.push_back(e / static_cast<double>(test.size()));
  }
  EXPECT_GT(mae[0], mae[1]);
  EXPECT_GT(mae[1], mae[2]);
}
