#pragma once

#include <array>

#include "fairbayes/core_data.hpp"

namespace fairbayes {

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// One-parameter family of group-wise thresholds q_a(t) for a binary
/// protected attribute, with s_a = 2a - 1:
///
///   DP              q_a = 1/2 + s_a t / (2 p_a)
///   cost-sensitive  q_a = c + s_a t / p_a
///   EO              q_a = p_a p_Ya / (2 p_a p_Ya - s_a t)
///   PE              q_a = (p_a (1 - p_Ya) + s_a t) / (2 p_a (1 - p_Ya) + s_a t)
///   OA              q_a = (k_a - s_a p_Ya t) / (2 k_a - s_a t),  k_a = p_a p_Ya (1 - p_Ya)
///
/// t = 0 gives the unconstrained Bayes cut (1/2, or c). Increasing t lowers
/// the group-1 term of the corresponding disparity and raises the group-0
/// term. The same maps serve the empirical solvers (plug-in p-hat) and the
/// population oracle (true p).
class ThresholdFamily {
 public:
  enum class Kind { dp, cost_sensitive, eo, pe, oa };

  /// p[a] = P(A = a), p_y[a] = P(Y = 1 | A = a). Throws std::invalid_argument
  /// when a stratum the measure needs has zero mass ("empty stratum").
  static ThresholdFamily for_measure(Measure m, std::array<double, 2> p,
                                     std::array<double, 2> p_y);
  static ThresholdFamily cost_sensitive(double c, std::array<double, 2> p,
                                        std::array<double, 2> p_y);

  Kind kind() const noexcept { return kind_; }
  /// Disparity measure the family controls (DP for cost-sensitive).
  Measure measure() const noexcept;
  double cost() const noexcept { return cost_; }
  const std::array<double, 2>& p() const noexcept { return p_; }
  const std::array<double, 2>& p_y() const noexcept { return p_y_; }

  /// Valid parameter range. DP and cost-sensitive: the smallest interval on
  /// which both thresholds sweep all of [0, 1]. EO/PE/OA: the interval on
  /// which both thresholds stay in [0, 1] with positive denominators.
  Bracket bracket() const noexcept { return bracket_; }
  /// DP and cost-sensitive thresholds are clamped to [0, 1] outside their
  /// natural range; the other families reject t outside the bracket.
  bool clamps() const noexcept { return kind_ == Kind::dp || kind_ == Kind::cost_sensitive; }

  /// q_a(t) in [0, 1]. Throws std::domain_error("threshold out of range") for a
  /// non-clamping family and t outside the bracket.
  double threshold(int a, double t) const;
  /// Like threshold() but evaluates the nearest bracket end instead of throwing.
  double threshold_clamped(int a, double t) const;
  /// The t with q_a(t) = q; +-infinity when no finite t maps to q.
  double parameter_at(int a, double q) const;

 private:
  ThresholdFamily(Kind kind, double cost, std::array<double, 2> p, std::array<double, 2> p_y);
  double raw_threshold(int a, double t) const noexcept;

  Kind kind_;
  double cost_;
  std::array<double, 2> p_;
  std::array<double, 2> p_y_;
  Bracket bracket_;
};

}  // namespace fairbayes
