#include "fairbayes/fair_threshold.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "fairbayes/gaussian_oracle.hpp"
#include "fairbayes/sup_solve.hpp"

namespace fairbayes {

namespace {

void check_delta(double delta) {
  if (!(delta >= 0.0) || std::isnan(delta)) throw std::invalid_argument("delta must be >= 0");
}

bool in_unit(double v) { return v >= -1e-12 && v <= 1.0 + 1e-12; }

// Randomization at the boundary. When case 4 cannot reach the target with
// tau_1 = 0, tau_0 is pinned at the violated end and tau_1 absorbs the rest.
bool randomize_boundary(const DisparityFunction& f, double target, ThresholdRule& rule,
                        SolveDiagnostics& diag) {
  BoundaryMass g[2];
  for (int a = 0; a < 2; ++a) {
    g[a].tail = f.group_term(a, rule.thresholds[a], 0.0);
    g[a].atom = f.atom_weight(a, rule.thresholds[a]);
  }
  TauStar tau;
  try {
    tau = tau_star(g[1], g[0], target);
  } catch (const std::domain_error&) {
    if (g[1].atom == 0.0 || g[0].atom == 0.0) {
      diag.boundary_case = g[1].atom != 0.0 ? 2 : 3;
      return false;
    }
    const double raw0 = (g[1].tail - g[0].tail - target) / g[0].atom;
    const double tau0 = raw0 > 1.0 ? 1.0 : 0.0;
    const double tau1 = (g[0].tail + tau0 * g[0].atom + target - g[1].tail) / g[1].atom;
    diag.boundary_case = 4;
    if (!in_unit(tau1)) return false;
    tau = {std::clamp(tau1, 0.0, 1.0), tau0, 4};
  }
  diag.boundary_case = tau.boundary_case;
  rule.tie_prob = {tau.tau0, tau.tau1};
  return tau.boundary_case != 1;
}

}  // namespace

SolveResult solve_along(const DisparityFunction& f, double delta, bool randomize) {
  check_delta(delta);
  SolveResult res;
  res.constraint = {f.measure(), delta, f.family().cost()};
  SolveDiagnostics& diag = res.diagnostics;
  diag.bracket = f.bracket();
  diag.initial_disparity = f(0.0);
  diag.evaluations = 1;

  double target = 0.0;
  if (std::abs(diag.initial_disparity) <= delta) {
    diag.branch = SolveBranch::unconstrained;
  } else {
    diag.branch = diag.initial_disparity > 0.0 ? SolveBranch::upper : SolveBranch::lower;
    target = diag.branch == SolveBranch::upper ? delta : -delta;
    const SupResult sup = sup_solve_exact(std::cref(f), target, f.bracket(), f.breakpoints());
    res.t_hat = sup.t;
    diag.crossed = sup.crossed;
    diag.evaluations += sup.evaluations;
  }

  const auto q = f.thresholds(res.t_hat);
  res.rule = ThresholdRule({q[0], q[1]});
  if (randomize && diag.branch != SolveBranch::unconstrained) {
    if (randomize_boundary(f, target, res.rule, diag)) {
      diag.exact = std::abs(f.disparity(res.rule) - target) <= 1e-12;
    }
  }

  const GroupedScores& gs = f.scores();
  const EvalReport rep = evaluate(res.rule, gs, f.family().cost());
  res.achieved_disparity = f.disparity(res.rule);
  res.accuracy = rep.accuracy;
  res.cost_risk = rep.cost_risk;
  res.plugin_accuracy = plugin_accuracy(res.rule, gs);
  res.plugin_cost_risk = plugin_cost_risk(res.rule, gs, f.family().cost());
  return res;
}

SolveResult solve_dp(const GroupedScores& gs, double delta, bool randomize) {
  return solve_along(DisparityFunction(gs, Measure::DP), delta, randomize);
}

SolveResult solve_eo(const GroupedScores& gs, double delta, bool randomize) {
  return solve_along(DisparityFunction(gs, Measure::EO), delta, randomize);
}

SolveResult solve_pe(const GroupedScores& gs, double delta, bool randomize) {
  return solve_along(DisparityFunction(gs, Measure::PE), delta, randomize);
}

SolveResult solve_oa(const GroupedScores& gs, double delta, bool randomize) {
  return solve_along(DisparityFunction(gs, Measure::OA), delta, randomize);
}

SolveResult solve_cost_sensitive(const GroupedScores& gs, double cost, double delta, bool randomize) {
  if (!(cost >= 0.0 && cost <= 1.0)) throw std::invalid_argument("cost must lie in [0, 1]");
  return solve_along(DisparityFunction::cost_sensitive(gs, cost), delta, randomize);
}

SolveResult solve(const GroupedScores& gs, const FairnessConstraint& constraint, bool randomize) {
  constraint.validate();
  if (constraint.measure == Measure::DP && constraint.cost != 0.5) {
    return solve_cost_sensitive(gs, constraint.cost, constraint.delta, randomize);
  }
  return solve_along(DisparityFunction(gs, constraint.measure), constraint.delta, randomize);
}

}  // namespace fairbayes
