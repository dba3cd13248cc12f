#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "fairbayes/threshold_family.hpp"

namespace fairbayes {

struct SupResult {
  double t = 0.0;
  /// False when no point of the bracket satisfies f(t) > target; t is then
  /// the lower bracket end.
  bool crossed = false;
  std::size_t evaluations = 0;
  Bracket bracket;
};

/// sup{t in [lo, hi] : f(t) > target} for a step function whose value only
/// changes at `candidates`. Every candidate and every open interval between
/// consecutive candidates is examined from the right, so the result is exact
/// and does not rely on f being monotone. Candidates outside the open
/// bracket are ignored.
SupResult sup_solve_exact(const std::function<double(double)>& f, double target, Bracket bracket,
                          std::span<const double> candidates);

/// Bisection for a non-increasing f, to absolute tolerance `tol` in t.
SupResult sup_solve_bisection(const std::function<double(double)>& f, double target, Bracket bracket,
                              double tol = 1e-10);

}  // namespace fairbayes
