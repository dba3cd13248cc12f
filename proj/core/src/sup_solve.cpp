#include "fairbayes/sup_solve.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace fairbayes {

namespace {

void check_bracket(Bracket b) {
  if (!(b.lo <= b.hi)) throw std::invalid_argument("sup_solve: empty bracket");
}

}  // namespace

SupResult sup_solve_exact(const std::function<double(double)>& f, double target, Bracket bracket,
                          std::span<const double> candidates) {
  check_bracket(bracket);
  std::vector<double> pts;
  pts.reserve(candidates.size() + 2);
  pts.push_back(bracket.lo);
  for (double c : candidates) {
    if (c > bracket.lo && c < bracket.hi) pts.push_back(c);
  }
  std::sort(pts.begin() + 1, pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (bracket.hi > bracket.lo) pts.push_back(bracket.hi);

  SupResult r;
  r.bracket = bracket;
  auto above = [&](double t) {
    ++r.evaluations;
    return f(t) > target;
  };
  const std::size_t m = pts.size();
  if (above(pts[m - 1])) {
    r.t = pts[m - 1];
    r.crossed = true;
    return r;
  }
  for (std::size_t k = m - 1; k-- > 0;) {
    // f is constant on (pts[k], pts[k+1]); if it exceeds the target there,
    // the supremum is the right end of that interval.
    if (above(0.5 * (pts[k] + pts[k + 1]))) {
      r.t = pts[k + 1];
      r.crossed = true;
      return r;
    }
    if (above(pts[k])) {
      r.t = pts[k];
      r.crossed = true;
      return r;
    }
  }
  r.t = bracket.lo;
  return r;
}

SupResult sup_solve_bisection(const std::function<double(double)>& f, double target, Bracket bracket,
                              double tol) {
  check_bracket(bracket);
  if (!(tol > 0.0)) throw std::invalid_argument("sup_solve: tolerance must be positive");
  SupResult r;
  r.bracket = bracket;
  r.evaluations = 1;
  if (!(f(bracket.lo) > target)) {
    r.t = bracket.lo;
    return r;
  }
  r.crossed = true;
  ++r.evaluations;
  if (f(bracket.hi) > target) {
    r.t = bracket.hi;
    return r;
  }
  double a = bracket.lo;
  double b = bracket.hi;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    ++r.evaluations;
    if (f(mid) > target) {
      a = mid;
    } else {
      b = mid;
    }
  }
  r.t = 0.5 * (a + b);
  return r;
}

}  // namespace fairbayes
