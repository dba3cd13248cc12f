#pragma once

#include <array>
#include <span>
#include <vector>

#include "fairbayes/core_data.hpp"
#include "fairbayes/threshold_family.hpp"

namespace fairbayes {

class ScoreModel;

/// Scores split by (group, label), each list sorted ascending.
class GroupedScores {
 public:
  /// Throws std::invalid_argument on length mismatch, scores outside [0, 1]
  /// or NaN, and for a group without rows.
  GroupedScores(std::span<const double> scores, std::span<const int> group,
                std::span<const int> label, int group_count);
  static GroupedScores from_model(const ScoreModel& model, const Dataset& data);

  int group_count() const noexcept { return stats_.group_count(); }
  const GroupStats& stats() const noexcept { return stats_; }
  std::span<const double> scores(int a) const { return all_.at(a); }
  std::span<const double> scores(int a, int y) const { return strata_.at(a).at(y); }

 private:
  std::vector<std::array<std::vector<double>, 2>> strata_;
  std::vector<std::vector<double>> all_;
  GroupStats stats_;
};

/// (#{s > q} + tau * #{s == q}) / #scores for an ascending score list.
/// Throws std::invalid_argument for an empty list.
double positive_rate(std::span<const double> sorted_scores, double q, double tau = 0.0);
/// Number of scores equal to q.
std::size_t atom_count(std::span<const double> sorted_scores, double q);

/// Empirical disparity t -> D(t) of a binary-group threshold family: the
/// group-1 minus group-0 term evaluated at thresholds q_a(t).
///
/// The function is a step function in t. Its jump points (transformed score
/// values) are precomputed; at a jump point the threshold of the jumping group
/// is snapped onto the score itself, so values there are exact rather than
/// subject to rounding in the threshold map.
///
/// Holds a reference to `gs`, which must outlive it.
class DisparityFunction {
 public:
  DisparityFunction(const GroupedScores& gs, Measure measure);
  /// DDP along the cost-sensitive family q_a = c + (2a - 1) t / p_a.
  static DisparityFunction cost_sensitive(const GroupedScores& gs, double c);

  const ThresholdFamily& family() const noexcept { return family_; }
  Measure measure() const noexcept { return family_.measure(); }
  Bracket bracket() const noexcept { return family_.bracket(); }
  const GroupedScores& scores() const noexcept { return *gs_; }

  /// Thresholds (q_0, q_1) at t. For EO/PE/OA throws
  /// std::domain_error("threshold out of range") outside the bracket.
  std::array<double, 2> thresholds(double t) const;
  /// Like thresholds() but clamps t to the bracket first (diagnostics only).
  std::array<double, 2> thresholds_clamped(double t) const;
  double operator()(double t) const;

  /// Group term of the measure at threshold q and tie probability tau.
  double group_term(int a, double q, double tau = 0.0) const;
  /// Change of the group term per unit tau at threshold q (mass of the atom
  /// at q). Signed for OA, where label-0 atoms count negatively.
  double atom_weight(int a, double q) const;
  /// Disparity of an arbitrary binary rule under this measure.
  double disparity(const ThresholdRule& rule) const;

  /// Sorted jump points strictly inside the bracket.
  const std::vector<double>& breakpoints() const noexcept { return breakpoint_t_; }

 private:
  DisparityFunction(const GroupedScores& gs, ThresholdFamily family);
  void build_breakpoints();
  void build_jump_parameters();
  std::array<double, 2> snapped(std::size_t k, double t) const;
  /// Group term at a t in the bracket that is not a breakpoint of group a,
  /// decided by comparing t with each score's jump parameter.
  double counted_term(int a, double t) const;

  const GroupedScores* gs_;
  ThresholdFamily family_;
  std::vector<double> breakpoint_t_;
  // Per breakpoint: snapped threshold of each group, NaN when that group does
  // not jump there.
  std::vector<std::array<double, 2>> breakpoint_q_;
  // +1 when q_a rises with t (a score is predicted while t < its jump
  // parameter), -1 when it falls (predicted while t > it).
  std::array<int, 2> direction_{1, 1};
  // Sorted jump parameters per (group, label).
  std::array<std::array<std::vector<double>, 2>, 2> jump_t_;
};

/// Empirical DDP/DEO/DPE/DOA along the plug-in families.
double ddp_hat(const GroupedScores& gs, double t);
double deo_hat(const GroupedScores& gs, double t);
double dpe_hat(const GroupedScores& gs, double t);
double doa_hat(const GroupedScores& gs, double t);

/// Accuracy, R_c risk and all disparities of `rule` on the labelled scores.
/// Rates of an empty (group, label) stratum are NaN, as are the disparities
/// that use them.
EvalReport evaluate(const ThresholdRule& rule, const GroupedScores& gs, double cost = 0.5);

/// Expected accuracy of `rule` when the scores are taken as the true
/// conditional probabilities: mean of f s + (1 - f)(1 - s).
double plugin_accuracy(const ThresholdRule& rule, const GroupedScores& gs);
/// Plug-in R_c: mean of c f (1 - s) + (1 - c)(1 - f) s.
double plugin_cost_risk(const ThresholdRule& rule, const GroupedScores& gs, double cost);

}  // namespace fairbayes
