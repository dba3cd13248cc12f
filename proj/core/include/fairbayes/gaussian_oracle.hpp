#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include "fairbayes/core_data.hpp"
#include "fairbayes/kv_config.hpp"
#include "fairbayes/score_models.hpp"
#include "fairbayes/threshold_family.hpp"

namespace fairbayes {

/// Mixture with A ~ p, Y | A=a ~ Bernoulli(p_y[a]) and
/// X | A=a, Y=y ~ N(mu[a][y], sigma^2 I).
struct GaussianPopulation {
  std::vector<double> p;
  std::vector<double> p_y;
  std::vector<std::array<std::vector<double>, 2>> mu;
  double sigma = 1.0;

  int group_count() const noexcept { return static_cast<int>(p.size()); }
  std::size_t dimension() const noexcept { return mu.empty() ? 0 : mu[0][0].size(); }
  /// Throws std::invalid_argument unless p sums to 1, p_y lies in (0, 1),
  /// sigma > 0 and every mean is finite with a common dimension.
  void validate() const;

  KeyValueDoc to_doc() const;
  static GaussianPopulation from_doc(const KeyValueDoc& doc);
  void save(const std::filesystem::path& path) const;
  static GaussianPopulation load(const std::filesystem::path& path);
};

/// Law of a linear log-odds score within one group: N(mean[y], sd^2) given
/// Y = y. sd = 0 means a point mass.
struct GroupScoreLaw {
  std::array<double, 2> mean{0.0, 0.0};
  double sd = 0.0;
};

struct ScoreLaw {
  std::vector<GroupScoreLaw> groups;
};

/// The law of logit(eta_a(X)): mean logit(p_Ya) +- s_a^2 / 2 and sd
/// s_a = |mu_a1 - mu_a0| / sigma.
ScoreLaw score_law(const GaussianPopulation& pop);
/// The law of the score w_a . x + b_a of a learned linear rule, one affine
/// score per group in raw feature units.
ScoreLaw score_law(const GaussianPopulation& pop, std::span<const AffineScore> rule_scores);

/// P(Z > z) for standard normal Z.
double normal_upper_tail(double z) noexcept;
double normal_cdf(double z) noexcept;

double eta(const GaussianPopulation& pop, std::span<const double> x, int a);

enum class Stratum { marginal, positive, negative };

/// P(eta_a(X) > q | A = a [, Y = y]). Returns 1 for q <= 0 and 0 for q >= 1.
double tail_rate(const GaussianPopulation& pop, int a, double q, Stratum stratum);
/// Same for an arbitrary score law: P(score > logit(q)).
double tail_rate(const ScoreLaw& law, const GaussianPopulation& pop, int a, double q, Stratum stratum);

/// Exact population metrics of a threshold rule applied to `law`. Tie
/// probabilities are ignored because the score laws are continuous.
EvalReport population_eval(const GaussianPopulation& pop, const ScoreLaw& law,
                           const ThresholdRule& rule, double cost = 0.5);
double fair_accuracy(const GaussianPopulation& pop, const ThresholdRule& rule);
double fair_risk(const GaussianPopulation& pop, const ThresholdRule& rule, double cost);

/// Disparity of the unconstrained Bayes rule (thresholds 1/2).
double d_star(const GaussianPopulation& pop);
double e_star(const GaussianPopulation& pop);
double p_star(const GaussianPopulation& pop);
double o_star(const GaussianPopulation& pop);
double star(const GaussianPopulation& pop, Measure m);

/// Population threshold family with the true p_a and p_Ya.
ThresholdFamily population_family(const GaussianPopulation& pop, Measure m);
ThresholdFamily population_cost_family(const GaussianPopulation& pop, double cost);
/// Population disparity along a family at parameter t.
double population_disparity(const GaussianPopulation& pop, const ThresholdFamily& family, double t);

struct OracleSolution {
  double t = 0.0;
  ThresholdRule rule;
  double disparity = 0.0;
  double accuracy = 0.0;
  double cost_risk = 0.0;
  std::size_t evaluations = 0;
};

/// The delta-fair Bayes-optimal rule along `family`: t = 0 when the initial
/// disparity is within delta, else sup{t : D(t) > sign(D(0)) delta} by
/// bisection. Throws std::runtime_error when the bracket holds no crossing.
OracleSolution oracle_solve(const GaussianPopulation& pop, const ThresholdFamily& family, double delta,
                            double tol = 1e-13);
double t_star(const GaussianPopulation& pop, Measure m, double delta);
OracleSolution oracle_rule(const GaussianPopulation& pop, Measure m, double delta);
OracleSolution oracle_cost_sensitive(const GaussianPopulation& pop, double cost, double delta);

/// Boundary randomization. For group a, `tail` is the group term from scores
/// strictly above the threshold and `atom` the weight of the score atom at
/// the threshold, so the disparity is
///   tail_1 + tau_1 atom_1 - tail_0 - tau_0 atom_0.
struct BoundaryMass {
  double tail = 0.0;
  double atom = 0.0;
};

struct TauStar {
  double tau1 = 0.0;
  double tau0 = 0.0;
  /// 1: no atoms; 2: atom in group 1 only; 3: atom in group 0 only; 4: both.
  int boundary_case = 1;
};

/// Randomization constants making the disparity equal `target`
/// (sign(D*) delta). Case 4 fixes tau_1 = 0. Throws std::domain_error when a
/// constant falls outside [0, 1].
TauStar tau_star(BoundaryMass group1, BoundaryMass group0, double target);

struct MulticlassOracle {
  std::vector<double> t;
  std::vector<double> thresholds;
  double rate = 0.0;
  double accuracy = 0.0;
};

/// Perfect-DP rule for any number of groups: thresholds 1/2 + t_a / (2 p_a)
/// with sum_a t_a = 0 and a common positive rate s*.
MulticlassOracle oracle_multiclass_dp(const GaussianPopulation& pop, double tol = 1e-12);

}  // namespace fairbayes
