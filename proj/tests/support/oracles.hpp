#pragma once

// Reference implementations used by the unit and acceptance tests. Nothing
// here calls into the solver or metric code; every quantity is recomputed
// from raw (score, group, label) triples by brute force.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fairbayes/core_data.hpp"
#include "fairbayes/gaussian_oracle.hpp"
#include "fairbayes/random.hpp"

namespace fairbayes::testing {

/// Scores with group and label per point.
struct Toy {
  std::vector<double> score;
  std::vector<int> group;
  std::vector<int> label;

  std::size_t size() const { return score.size(); }
  std::size_t count(int a) const;
  std::size_t count(int a, int y) const;
};

struct ToyOptions {
  std::size_t min_n = 8;
  std::size_t max_n = 60;
  /// Each (group, label) stratum gets at least this many points.
  std::size_t min_stratum = 1;
  /// Draw labels as Bernoulli(score) instead of independently.
  bool calibrated = true;
  /// All scores distinct; otherwise scores come from `levels` atoms.
  bool distinct = true;
  int levels = 5;
  /// Shift group-1 scores upwards to create initial disparity.
  double group_shift = 0.15;
};

Toy random_toy(Rng& rng, const ToyOptions& opt = {});
/// Multi-group version without the stratum requirement (only groups nonempty).
Toy random_multigroup_toy(Rng& rng, int groups, std::size_t n, int levels);

/// Probability of predicting 1 under a rule for one point.
double predict(const ThresholdRule& rule, double s, int a);

/// Rates by direct loops. y = -1 means every label.
double naive_rate(const Toy& d, const ThresholdRule& rule, int a, int y = -1);
double naive_disparity(const Toy& d, const ThresholdRule& rule, Measure m);
double naive_accuracy(const Toy& d, const ThresholdRule& rule);

/// Objective and constraint functional of the plug-in problem, where the
/// scores are treated as the true probabilities and the rule is f (for each
/// point, a probability of predicting 1):
///   objective  sum f (2s - 1)        (accuracy, up to constants)
///              sum f (s - c)          (minus the R_c risk, up to constants)
///   constraint group-1 minus group-0 contribution of the measure, each
///              point weighted by 1/n_a (DP), s/n_a1 (EO), (1-s)/n_a0 (PE)
///              or s/n_a1 - (1-s)/n_a0 (OA).
struct PluginProblem {
  Measure measure = Measure::DP;
  bool cost_sensitive = false;
  double cost = 0.5;
};
double plugin_objective(const Toy& d, const std::vector<double>& f, const PluginProblem& p);
double plugin_constraint(const Toy& d, const std::vector<double>& f, const PluginProblem& p);
std::vector<double> rule_decisions(const Toy& d, const ThresholdRule& rule);

/// Largest plug-in objective over all deterministic per-group threshold
/// pairs (each group predicts 1 on its top-k scores, k = 0..n_a) whose
/// constraint satisfies sign * C <= sign * limit + slack.
struct BruteForce {
  double best_objective = 0.0;
  std::array<std::size_t, 2> best_k{0, 0};
  std::size_t pairs = 0;
};
BruteForce brute_force_pairs(const Toy& d, const PluginProblem& p, int sign, double limit,
                             double slack = 1e-12);

/// Rightmost point of {t : f(t) > target} over a dense candidate list: each
/// candidate and the midpoint of each gap, plus the two ends, scanned from
/// the right. Returns lo when no point qualifies.
double scan_sup(const std::function<double(double)>& f, double target, double lo, double hi,
                std::vector<double> candidates);

/// Log-density of N(mu, sigma^2 I) up to the shared normalizing constant.
double log_density(std::span<const double> x, std::span<const double> mu, double sigma);
/// P(Y=1 | A=a, X=x) from the two class densities directly.
double eta_direct(const GaussianPopulation& pop, std::span<const double> x, int a);

/// Monte Carlo estimate of P(eta_a(X) > q | A = a, stratum) with its
/// standard error, drawing X from the mixture.
struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
};
McEstimate mc_tail_rate(const GaussianPopulation& pop, int a, double q, Stratum stratum,
                        std::size_t draws, std::uint64_t seed);

/// P(Z > z) by composite Simpson integration of the normal density.
double normal_tail_simpson(double z);

/// A random valid binary (or multi-group) Gaussian population.
GaussianPopulation random_population(Rng& rng, int groups, std::size_t dimension);

}  // namespace fairbayes::testing
