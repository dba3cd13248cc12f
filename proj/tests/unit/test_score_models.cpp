#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "fairbayes/score_models.hpp"
#include "fairbayes/synthetic_gen.hpp"
#include "oracles.hpp"

using namespace fairbayes;
namespace oracle = fairbayes::testing;

namespace {

Dataset one_feature(const std::vector<double>& x, const std::vector<int>& y, std::vector<int> g = {}) {
  if (g.empty()) g.assign(x.size(), 0);
  return Dataset(FeatureMatrix(x.size(), 1, x), std::move(g), y);
}

}  // namespace

TEST(Sigmoid, SymmetryAndSaturation) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(3.0) + sigmoid(-3.0), 1.0, 1e-15);
  EXPECT_EQ(sigmoid(800.0), 1.0);
  EXPECT_EQ(sigmoid(-800.0), 0.0);
  double prev = 0.0;
  for (double z = -30.0; z <= 30.0; z += 0.25) {
    EXPECT_GE(sigmoid(z), prev);
    prev = sigmoid(z);
  }
}

TEST(LogisticModel, ZeroWeightsGiveHalf) {
  const LogisticModel m(GroupMode::joint, 2, {0.0, 0.0}, {1.0, 1.0}, {LinearHead{{0, 0, 0, 0}, 0.0}});
  const std::vector<double> x{3.0, -7.0};
  EXPECT_DOUBLE_EQ(m.predict_proba(x, 0), 0.5);
  EXPECT_DOUBLE_EQ(m.predict_proba(x, 1), 0.5);
}

TEST(LogisticModel, LargeBiasSaturates) {
  const LogisticModel m(GroupMode::per_group, 1, {0.0}, {1.0}, {LinearHead{{0.0}, 60.0}});
  const std::vector<double> x{0.3};
  EXPECT_GT(m.predict_proba(x, 0), 1.0 - 1e-15);
}

TEST(LogisticModel, DimensionAndGroupChecks) {
  const LogisticModel m(GroupMode::per_group, 2, {0.0}, {1.0}, {LinearHead{{1.0}, 0.0}, LinearHead{{2.0}, 0.0}});
  const std::vector<double> bad{1.0, 2.0};
  const std::vector<double> ok{1.0};
  EXPECT_THROW(m.predict_proba(bad, 0), std::invalid_argument);
  EXPECT_THROW(m.predict_proba(ok, 2), std::invalid_argument);
  EXPECT_THROW(LogisticModel(GroupMode::per_group, 2, {0.0}, {1.0}, {LinearHead{{1.0}, 0.0}}),
               std::invalid_argument);
  EXPECT_THROW(LogisticModel(GroupMode::per_group, 1, {0.0}, {1.0}, {LinearHead{{NAN}, 0.0}}),
               std::invalid_argument);
}

TEST(LogisticModel, AffineScoreMatchesLogOdds) {
  const LogisticModel m(GroupMode::joint, 2, {1.0, -2.0}, {2.0, 0.5}, {LinearHead{{0.3, -1.1, 0.4, -0.2}, 0.7}});
  const std::vector<double> x{0.25, 3.0};
  for (int a = 0; a < 2; ++a) {
    const AffineScore s = m.affine_score(a);
    const double z = s.weights[0] * x[0] + s.weights[1] * x[1] + s.bias;
    EXPECT_NEAR(z, m.log_odds(x, a), 1e-12);
  }
}

TEST(FitLogistic, SeparableDataReachesFullAccuracy) {
  const Dataset d = one_feature({-3, -2, -1.5, -1, -0.5, 0.5, 1, 1.5, 2, 3}, {0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
  TrainingConfig cfg;
  cfg.epochs = 3000;
  const LogisticModel m = fit_logistic(d, cfg);
  const auto s = predict_scores(m, d);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(s[i] > 0.5, d.label()[i] == 1);
}

TEST(FitLogistic, AllPositiveLabelsApproachOne) {
  const Dataset d = one_feature({0.1, 0.5, 0.9, 1.3}, {1, 1, 1, 1});
  double prev = 0.0;
  for (std::size_t epochs : {10u, 100u, 1000u}) {
    TrainingConfig cfg;
    cfg.epochs = epochs;
    const auto s = predict_scores(fit_logistic(d, cfg), d);
    const double lo = *std::min_element(s.begin(), s.end());
    EXPECT_GT(lo, prev);
    prev = lo;
  }
  EXPECT_GT(prev, 0.99);
}

TEST(FitLogistic, SaturatedTwoPointFitMatchesClosedForm) {
  // x = 0: 1 of 4 positive, x = 1: 3 of 4 positive. The MLE is
  // sigmoid(b) = 1/4 and sigmoid(w + b) = 3/4, i.e. b = -ln 3, w = ln 9.
  const Dataset d = one_feature({0, 0, 0, 0, 1, 1, 1, 1}, {1, 0, 0, 0, 1, 1, 1, 0});
  TrainingConfig cfg;
  cfg.epochs = 4000;
  const LogisticModel m = fit_logistic(d, cfg);
  const AffineScore s = m.affine_score(0);
  EXPECT_NEAR(s.bias, -std::log(3.0), 1e-6);
  EXPECT_NEAR(s.weights[0], std::log(9.0), 1e-6);
  const std::vector<double> x0{0.0}, x1{1.0};
  EXPECT_NEAR(m.predict_proba(x0, 0), 0.25, 1e-7);
  EXPECT_NEAR(m.predict_proba(x1, 0), 0.75, 1e-7);
}

TEST(FitLogistic, FullBatchLossNonIncreasing) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(4));
  const Dataset d = sample(pop, 2000, 8);
  for (GroupMode mode : {GroupMode::joint, GroupMode::per_group}) {
    TrainingConfig cfg;
    cfg.group_mode = mode;
    cfg.epochs = 200;
    const LogisticModel m = fit_logistic(d, cfg);
    const auto& loss = m.training_loss();
    ASSERT_EQ(loss.size(), 200u);
    for (std::size_t e = 1; e < loss.size(); ++e) EXPECT_LE(loss[e], loss[e - 1] + 1e-12) << "epoch " << e;
  }
}

TEST(FitLogistic, GaussianFitCloseToOracleEta) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(21));
  const Dataset train = sample(pop, 20000, 1);
  const Dataset test = sample(pop, 5000, 2);
  TrainingConfig cfg;
  cfg.group_mode = GroupMode::per_group;
  const LogisticModel m = fit_logistic(train, cfg);
  const auto s = predict_scores(m, test);
  double mae = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    mae += std::abs(s[i] - oracle::eta_direct(pop, test.features().row(i), test.group()[i]));
  }
  mae /= static_cast<double>(test.size());
  EXPECT_LT(mae, 0.05);
}

TEST(FitLogistic, MiniBatchIsSeeded) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(2));
  const Dataset d = sample(pop, 500, 3);
  TrainingConfig cfg;
  cfg.batch_size = 32;
  cfg.epochs = 20;
  cfg.learning_rate = 0.1;
  cfg.seed = 5;
  const auto a = fit_logistic(d, cfg);
  const auto b = fit_logistic(d, cfg);
  cfg.seed = 6;
  const auto c = fit_logistic(d, cfg);
  EXPECT_EQ(a.heads()[0].weights, b.heads()[0].weights);
  EXPECT_NE(a.heads()[0].weights, c.heads()[0].weights);
}

TEST(FitLogistic, Errors) {
  TrainingConfig cfg;
  EXPECT_THROW(fit_logistic(Dataset{}, cfg), std::invalid_argument);
  const Dataset bad = one_feature({0.0, NAN}, {0, 1});
  EXPECT_THROW(fit_logistic(bad, cfg), std::invalid_argument);
  cfg.epochs = 0;
  EXPECT_THROW(fit_logistic(one_feature({0.0, 1.0}, {0, 1}), cfg), std::invalid_argument);
}

TEST(FitLogistic, CounterCountsFits) {
  const Dataset d = one_feature({0.0, 1.0}, {0, 1});
  TrainingConfig cfg;
  cfg.epochs = 2;
  const auto before = logistic_fit_count();
  fit_logistic(d, cfg);
  fit_logistic(d, cfg);
  EXPECT_EQ(logistic_fit_count() - before, 2u);
}

TEST(LogisticRisk, GradientMatchesCentralDifferences) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 30, p = 4;
    FeatureMatrix x(n, p);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) x(i, j) = rng.normal();
      y[i] = rng.bernoulli(0.5);
    }
    std::vector<double> w(p);
    for (double& v : w) v = rng.normal();
    const double b = rng.normal();
    const double l2 = trial % 2 ? 0.1 : 0.0;
    std::vector<double> gw(p);
    double gb = 0.0;
    logistic_risk_gradient(x, y, w, b, l2, gw, gb);
    const double h = 1e-6;
    for (std::size_t j = 0; j < p; ++j) {
      auto wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      const double fd = (logistic_risk(x, y, wp, b, l2) - logistic_risk(x, y, wm, b, l2)) / (2 * h);
      EXPECT_LE(std::abs(fd - gw[j]), 1e-5 * std::max(1.0, std::abs(gw[j])));
    }
    const double fdb = (logistic_risk(x, y, w, b + h, l2) - logistic_risk(x, y, w, b - h, l2)) / (2 * h);
    EXPECT_LE(std::abs(fdb - gb), 1e-5 * std::max(1.0, std::abs(gb)));
  }
}

TEST(LogisticModel, SaveLoadRoundTripIsExact) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(1));
  const Dataset d = sample(pop, 400, 2);
  for (GroupMode mode : {GroupMode::joint, GroupMode::per_group}) {
    TrainingConfig cfg;
    cfg.group_mode = mode;
    cfg.epochs = 50;
    const LogisticModel m = fit_logistic(d, cfg);
    const auto path = std::filesystem::temp_directory_path() / "fairbayes_model_roundtrip.txt";
    m.save(path);
    const LogisticModel back = LogisticModel::load(path);
    std::filesystem::remove(path);
    EXPECT_EQ(predict_scores(m, d), predict_scores(back, d));
  }
  KeyValueDoc wrong;
  wrong.add("format", "other");
  EXPECT_THROW(LogisticModel::from_doc(wrong), std::runtime_error);
}
