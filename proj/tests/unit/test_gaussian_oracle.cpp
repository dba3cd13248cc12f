#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "fairbayes/gaussian_oracle.hpp"
#include "fairbayes/synthetic_gen.hpp"
#include "oracles.hpp"

using namespace fairbayes;
namespace oracle = fairbayes::testing;

namespace {

GaussianPopulation two_groups(std::array<double, 2> p_y, std::vector<double> mu0, std::vector<double> mu1,
                              double sigma = 1.0) {
  GaussianPopulation pop;
  pop.p = {0.5, 0.5};
  pop.p_y = {p_y[0], p_y[1]};
  pop.sigma = sigma;
  pop.mu = {{mu0, mu1}, {mu0, mu1}};
  return pop;
}

GaussianPopulation swapped(const GaussianPopulation& pop) {
  GaussianPopulation s = pop;
  std::swap(s.p[0], s.p[1]);
  std::swap(s.p_y[0], s.p_y[1]);
  std::swap(s.mu[0], s.mu[1]);
  return s;
}

constexpr Measure kMeasures[] = {Measure::DP, Measure::EO, Measure::PE, Measure::OA};

}  // namespace

TEST(NormalTail, MatchesSimpsonIntegration) {
  for (double z : {-4.0, -1.5, 0.0, 0.3, 1.0, 2.5, 5.0}) {
    EXPECT_NEAR(normal_upper_tail(z), oracle::normal_tail_simpson(z), 1e-12) << z;
    EXPECT_NEAR(normal_cdf(z) + normal_upper_tail(z), 1.0, 1e-15);
  }
  EXPECT_GT(normal_upper_tail(30.0), 0.0);
  EXPECT_NEAR(normal_upper_tail(30.0) / 4.906713927148187e-198, 1.0, 1e-12);
}

TEST(Eta, AgreesWithDirectDensityRatio) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianPopulation pop = oracle::random_population(rng, 2, 1 + rng.index(6));
    std::vector<double> x(pop.dimension());
    for (int k = 0; k < 50; ++k) {
      for (double& v : x) v = rng.normal(0.5, 2.0);
      for (int a = 0; a < 2; ++a) ASSERT_NEAR(eta(pop, x, a), oracle::eta_direct(pop, x, a), 1e-12);
    }
  }
}

TEST(Eta, SymmetricAndUninformativeCases) {
  const GaussianPopulation sym = two_groups({0.5, 0.5}, {0.0, 0.0}, {1.0, 2.0});
  const std::vector<double> mid{0.5, 1.0};
  EXPECT_NEAR(eta(sym, mid, 0), 0.5, 1e-15);
  const GaussianPopulation flat = two_groups({0.3, 0.8}, {1.0, 1.0}, {1.0, 1.0});
  const std::vector<double> x{-3.0, 7.0};
  EXPECT_NEAR(eta(flat, x, 0), 0.3, 1e-15);
  EXPECT_NEAR(eta(flat, x, 1), 0.8, 1e-15);
  EXPECT_THROW(eta(flat, std::vector<double>{1.0}, 0), std::invalid_argument);
}

TEST(TailRate, SaturationAndPointMass) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(3));
  EXPECT_EQ(tail_rate(pop, 1, 0.0, Stratum::marginal), 1.0);
  EXPECT_EQ(tail_rate(pop, 1, 1.0, Stratum::positive), 0.0);
  EXPECT_NEAR(tail_rate(pop, 1, 1e-12, Stratum::negative), 1.0, 1e-9);
  const GaussianPopulation flat = two_groups({0.3, 0.8}, {1.0}, {1.0});
  EXPECT_EQ(tail_rate(flat, 0, 0.2, Stratum::marginal), 1.0);
  EXPECT_EQ(tail_rate(flat, 0, 0.4, Stratum::marginal), 0.0);
  EXPECT_EQ(tail_rate(flat, 1, 0.79, Stratum::positive), 1.0);
  EXPECT_EQ(tail_rate(flat, 1, 0.81, Stratum::negative), 0.0);
}

TEST(TailRate, MatchesMonteCarlo) {
  Rng rng(2);
  for (int trial = 0; trial < 4; ++trial) {
    const GaussianPopulation pop = oracle::random_population(rng, 2, 4);
    const int a = trial % 2;
    const double q = rng.uniform(0.2, 0.8);
    for (Stratum s : {Stratum::marginal, Stratum::positive, Stratum::negative}) {
      const auto mc = oracle::mc_tail_rate(pop, a, q, s, 200000, 100 + trial);
      EXPECT_NEAR(tail_rate(pop, a, q, s), mc.mean, 4.0 * mc.se);
    }
  }
}

TEST(ScoreLaw, DiscriminantWeightsReproduceTheLaw) {
  Rng rng(3);
  const GaussianPopulation pop = oracle::random_population(rng, 2, 5);
  std::vector<AffineScore> lda;
  const double s2 = pop.sigma * pop.sigma;
  for (int a = 0; a < 2; ++a) {
    AffineScore s;
    double n1 = 0.0, n0 = 0.0;
    for (std::size_t j = 0; j < pop.dimension(); ++j) {
      s.weights.push_back((pop.mu[a][1][j] - pop.mu[a][0][j]) / s2);
      n1 += pop.mu[a][1][j] * pop.mu[a][1][j];
      n0 += pop.mu[a][0][j] * pop.mu[a][0][j];
    }
    s.bias = std::log(pop.p_y[a] / (1.0 - pop.p_y[a])) - (n1 - n0) / (2.0 * s2);
    lda.push_back(s);
  }
  const ScoreLaw a = score_law(pop), b = score_law(pop, lda);
  for (int g = 0; g < 2; ++g) {
    EXPECT_NEAR(a.groups[g].sd, b.groups[g].sd, 1e-12);
    EXPECT_NEAR(a.groups[g].mean[0], b.groups[g].mean[0], 1e-12);
    EXPECT_NEAR(a.groups[g].mean[1], b.groups[g].mean[1], 1e-12);
  }
}

TEST(Stars, IdentityAntiSymmetryAndMonteCarlo) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(5));
  EXPECT_NEAR(d_star(pop), tail_rate(pop, 1, 0.5, Stratum::marginal) - tail_rate(pop, 0, 0.5, Stratum::marginal),
              1e-15);
  const auto m1 = oracle::mc_tail_rate(pop, 1, 0.5, Stratum::marginal, 200000, 7);
  const auto m0 = oracle::mc_tail_rate(pop, 0, 0.5, Stratum::marginal, 200000, 8);
  EXPECT_NEAR(d_star(pop), m1.mean - m0.mean, 4.0 * std::hypot(m1.se, m0.se));
  const GaussianPopulation sw = swapped(pop);
  for (Measure m : kMeasures) EXPECT_NEAR(star(sw, m), -star(pop, m), 1e-15);
  const GaussianPopulation same = two_groups({0.4, 0.4}, {0.0, 1.0}, {1.0, 0.0});
  for (Measure m : kMeasures) EXPECT_EQ(star(same, m), 0.0);
  EXPECT_EQ(e_star(pop), star(pop, Measure::EO));
  EXPECT_EQ(p_star(pop), star(pop, Measure::PE));
  EXPECT_EQ(o_star(pop), star(pop, Measure::OA));
}

TEST(TStar, LooseDeltaAndSymmetryGiveZero) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(5));
  for (Measure m : kMeasures) EXPECT_EQ(t_star(pop, m, std::abs(star(pop, m)) + 1e-6), 0.0);
  const GaussianPopulation same = two_groups({0.4, 0.4}, {0.0, 1.0}, {1.0, 0.0});
  EXPECT_EQ(t_star(same, Measure::DP, 0.0), 0.0);
}

TEST(TStar, DisparityAtOracleRuleEqualsTarget) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const GaussianPopulation pop = draw_population(SynthSpec::binary_default(seed));
    for (Measure m : kMeasures) {
      const double s = star(pop, m);
      for (double delta : {0.0, 0.05, 0.1}) {
        if (std::abs(s) <= delta) continue;
        const OracleSolution sol = oracle_rule(pop, m, delta);
        const ThresholdFamily fam = population_family(pop, m);
        ASSERT_NEAR(population_disparity(pop, fam, sol.t), (s > 0 ? 1 : -1) * delta, 1e-9) << to_string(m);
        ASSERT_NEAR(sol.disparity, (s > 0 ? 1 : -1) * delta, 1e-9);
      }
    }
    const OracleSolution cs = oracle_cost_sensitive(pop, 0.3, 0.05);
    if (std::abs(population_disparity(pop, population_cost_family(pop, 0.3), 0.0)) > 0.05) {
      EXPECT_NEAR(std::abs(cs.disparity), 0.05, 1e-9);
    }
  }
}

TEST(PopulationDisparity, StrictlyDecreasingAlongFamilies) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const GaussianPopulation pop = oracle::random_population(rng, 2, 3);
    for (Measure m : {Measure::DP, Measure::EO, Measure::PE}) {
      const ThresholdFamily fam = population_family(pop, m);
      const Bracket b = fam.bracket();
      double prev = population_disparity(pop, fam, b.lo + 1e-9);
      for (int k = 1; k < 500; ++k) {
        const double v = population_disparity(pop, fam, b.lo + (b.hi - b.lo) * k / 500.0);
        // Rates round to exactly 0 or 1 near the bracket ends.
        if (std::abs(prev) < 1.0 - 1e-12) {
          ASSERT_LT(v, prev) << to_string(m) << " k " << k;
        } else {
          ASSERT_LE(v, prev) << to_string(m) << " k " << k;
        }
        prev = v;
      }
    }
  }
}

TEST(FairAccuracy, UninformativeFeaturesAndConstantRule) {
  const GaussianPopulation flat = two_groups({0.3, 0.8}, {1.0}, {1.0});
  EXPECT_NEAR(fair_accuracy(flat, ThresholdRule({0.5, 0.5})), 0.5 * 0.7 + 0.5 * 0.8, 1e-15);
  EXPECT_NEAR(fair_accuracy(flat, ThresholdRule({1.0, 1.0})), 0.5 * 0.7 + 0.5 * 0.2, 1e-15);
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(2));
  EXPECT_NEAR(fair_accuracy(pop, ThresholdRule({1.0, 1.0})),
              pop.p[0] * (1 - pop.p_y[0]) + pop.p[1] * (1 - pop.p_y[1]), 1e-15);
  EXPECT_NEAR(fair_risk(pop, ThresholdRule({0.5, 0.5}), 0.5), 0.5 * (1.0 - fair_accuracy(pop, ThresholdRule({0.5, 0.5}))),
              1e-15);
}

TEST(FairAccuracy, BayesThresholdMaximalOnGrid) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(9));
  const double best = fair_accuracy(pop, ThresholdRule({0.5, 0.5}));
  for (int i = 1; i < 40; ++i) {
    for (int j = 1; j < 40; ++j) {
      ASSERT_LE(fair_accuracy(pop, ThresholdRule({i / 40.0, j / 40.0})), best + 1e-15);
    }
  }
}

TEST(FairAccuracy, NonDecreasingInDelta) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(11));
  const double bayes = fair_accuracy(pop, ThresholdRule({0.5, 0.5}));
  for (Measure m : {Measure::DP, Measure::EO, Measure::PE}) {
    double prev = 0.0;
    for (int k = 0; k <= 30; ++k) {
      const double acc = oracle_rule(pop, m, 0.01 * k).accuracy;
      ASSERT_GE(acc, prev - 1e-12) << to_string(m);
      prev = acc;
    }
    EXPECT_NEAR(oracle_rule(pop, m, std::abs(star(pop, m))).accuracy, bayes, 1e-15);
  }
}

TEST(TauStar, Cases) {
  const TauStar none = tau_star({0.4, 0.0}, {0.3, 0.0}, 0.05);
  EXPECT_EQ(none.boundary_case, 1);
  EXPECT_EQ(none.tau0, 0.0);
  EXPECT_EQ(none.tau1, 0.0);

  // Discrete law: group 1 puts 0.3 above the cut and an atom of 0.2 on it,
  // group 0 puts 0.1 above and no atom.
  const TauStar one = tau_star({0.3, 0.2}, {0.1, 0.0}, 0.25);
  EXPECT_EQ(one.boundary_case, 2);
  EXPECT_NEAR(0.3 + one.tau1 * 0.2 - 0.1, 0.25, 1e-15);

  const TauStar zero = tau_star({0.3, 0.0}, {0.1, 0.15}, 0.1);
  EXPECT_EQ(zero.boundary_case, 3);
  EXPECT_NEAR(0.3 - 0.1 - zero.tau0 * 0.15, 0.1, 1e-15);

  const TauStar both = tau_star({0.3, 0.2}, {0.1, 0.1}, 0.15);
  EXPECT_EQ(both.boundary_case, 4);
  EXPECT_EQ(both.tau1, 0.0);
  EXPECT_NEAR(0.3 - 0.1 - both.tau0 * 0.1, 0.15, 1e-15);

  EXPECT_THROW(tau_star({0.3, 0.2}, {0.1, 0.0}, 0.6), std::domain_error);
}

TEST(MulticlassOracle, IdenticalGroups) {
  GaussianPopulation pop;
  pop.p = {0.2, 0.3, 0.5};
  pop.p_y = {0.4, 0.4, 0.4};
  pop.sigma = 1.0;
  pop.mu.assign(3, {std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 0.5}});
  const MulticlassOracle o = oracle_multiclass_dp(pop);
  for (double t : o.t) EXPECT_NEAR(t, 0.0, 1e-9);
  EXPECT_NEAR(o.rate, tail_rate(pop, 0, 0.5, Stratum::marginal), 1e-9);
}

TEST(MulticlassOracle, TwoGroupsMatchBinaryOracle) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(13));
  const MulticlassOracle o = oracle_multiclass_dp(pop);
  const double t = t_star(pop, Measure::DP, 0.0);
  EXPECT_NEAR(o.t[1], t, 1e-8);
  EXPECT_NEAR(o.t[0], -t, 1e-8);
  EXPECT_NEAR(o.accuracy, oracle_rule(pop, Measure::DP, 0.0).accuracy, 1e-9);
}

TEST(MulticlassOracle, CommonRateOnThreeGroupModel) {
  const GaussianPopulation pop = draw_population(SynthSpec::multiclass_default(3, 4));
  const MulticlassOracle o = oracle_multiclass_dp(pop);
  double sum = 0.0;
  for (int a = 0; a < 3; ++a) {
    EXPECT_NEAR(tail_rate(pop, a, o.thresholds[a], Stratum::marginal), o.rate, 1e-9);
    sum += o.t[a];
  }
  EXPECT_NEAR(sum, 0.0, 1e-10);
}

TEST(GaussianPopulation, ValidationAndRoundTrip) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(17));
  const auto path = std::filesystem::temp_directory_path() / "fairbayes_population_roundtrip.txt";
  pop.save(path);
  const GaussianPopulation back = GaussianPopulation::load(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.p, pop.p);
  EXPECT_EQ(back.p_y, pop.p_y);
  EXPECT_EQ(back.sigma, pop.sigma);
  EXPECT_EQ(back.mu, pop.mu);

  GaussianPopulation bad = pop;
  bad.p = {0.5, 0.6};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = pop;
  bad.p_y[0] = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = pop;
  bad.sigma = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = pop;
  bad.mu[1][0].pop_back();
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}
