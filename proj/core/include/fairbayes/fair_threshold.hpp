#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fairbayes/core_data.hpp"
#include "fairbayes/fairness_metrics.hpp"
#include "fairbayes/threshold_family.hpp"

namespace fairbayes {

enum class SolveBranch {
  unconstrained,  ///< |D(0)| <= delta, t = 0
  upper,          ///< D(0) > delta, t = sup{t : D(t) > delta}
  lower,          ///< D(0) < -delta, t = sup{t : D(t) > -delta}
};

struct SolveDiagnostics {
  SolveBranch branch = SolveBranch::unconstrained;
  double initial_disparity = 0.0;
  bool crossed = true;
  std::size_t evaluations = 0;
  Bracket bracket;
  /// 0 when no randomization was attempted, else the boundary case 1-4.
  int boundary_case = 0;
  /// True when randomization was requested and hit the target exactly.
  bool exact = false;
};

struct SolveResult {
  double t_hat = 0.0;
  ThresholdRule rule;
  double achieved_disparity = 0.0;
  FairnessConstraint constraint;
  /// Accuracy and R_c on the solving sample.
  double accuracy = 0.0;
  double cost_risk = 0.0;
  /// The same with the scores taken as true probabilities.
  double plugin_accuracy = 0.0;
  double plugin_cost_risk = 0.0;
  SolveDiagnostics diagnostics;
};

/// Three-branch sup rule along an arbitrary binary disparity function. With
/// `randomize`, a tie probability at the boundary atom makes the disparity
/// bind at sign(D(0)) delta exactly.
SolveResult solve_along(const DisparityFunction& f, double delta, bool randomize);

SolveResult solve_dp(const GroupedScores& gs, double delta, bool randomize = false);
SolveResult solve_eo(const GroupedScores& gs, double delta, bool randomize = false);
SolveResult solve_pe(const GroupedScores& gs, double delta, bool randomize = false);
SolveResult solve_oa(const GroupedScores& gs, double delta, bool randomize = false);
/// DP control under R_c with thresholds c + (2a - 1) t / p_a.
SolveResult solve_cost_sensitive(const GroupedScores& gs, double cost, double delta,
                                 bool randomize = false);
/// Dispatch on the constraint; DP with cost != 1/2 goes to the cost-sensitive
/// family.
SolveResult solve(const GroupedScores& gs, const FairnessConstraint& constraint, bool randomize = false);

struct MulticlassResult {
  /// t_a with q_a = 1/2 + n t_a / (2 n_a).
  std::vector<double> t;
  ThresholdRule rule;
  std::vector<double> rates;
  double max_gap = 0.0;
  /// sum_a |rate_a - overall rate|
  double ddp_sum = 0.0;
  double t_sum = 0.0;
  double accuracy = 0.0;
  /// Empty when the rates could be matched with sum t_a = 0; otherwise a
  /// note on the best-achievable compromise.
  std::string diagnostic;
};

/// Perfect demographic parity for any number of groups. Group 0 is the
/// reference: for each of its achievable positive rates every other group
/// takes the nearest achievable rate, and the rate level where the
/// thresholds can be placed with sum_a t_a = 0 is selected.
MulticlassResult solve_multiclass_dp(const GroupedScores& gs);

}  // namespace fairbayes
