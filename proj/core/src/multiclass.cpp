#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fairbayes/fair_threshold.hpp"
#include "fairbayes/kv_config.hpp"

namespace fairbayes {

namespace {

// A positive-rate level of one group: every q in [q_lo, q_hi) (or the closed
// interval when !hi_open) leaves exactly `above` scores strictly above q.
struct Level {
  std::size_t above;
  double q_lo;
  double q_hi;
  bool hi_open;
};

// Levels ordered by increasing threshold, i.e. decreasing rate.
std::vector<Level> rate_levels(std::span<const double> sorted) {
  std::vector<Level> out;
  const std::size_t n = sorted.size();
  if (sorted.front() > 0.0) out.push_back({n, 0.0, sorted.front(), true});
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double lo = sorted[i];
    if (j < n) {
      out.push_back({n - j, lo, sorted[j], true});
    } else {
      out.push_back({0, lo, 1.0, false});
    }
    i = j;
  }
  return out;
}

// Index of the level of `levels` (size n_a) whose rate is nearest to r.
std::size_t nearest_level(const std::vector<Level>& levels, double n_a, double r) {
  std::size_t best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  // Rates decrease along the vector; binary search for the crossing.
  std::size_t lo = 0, hi = levels.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (static_cast<double>(levels[mid].above) / n_a > r) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  for (std::size_t k = lo > 0 ? lo - 1 : 0; k <= std::min(lo, levels.size() - 1); ++k) {
    const double gap = std::abs(static_cast<double>(levels[k].above) / n_a - r);
    if (gap < best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return best;
}

double upper_inside(const Level& l, double q) {
  if (l.hi_open && q >= l.q_hi) return std::max(l.q_lo, std::nextafter(l.q_hi, 0.0));
  return q;
}

}  // namespace

MulticlassResult solve_multiclass_dp(const GroupedScores& gs) {
  const int groups = gs.group_count();
  if (groups < 2) throw std::invalid_argument("multiclass solver needs at least two groups");
  const GroupStats& st = gs.stats();
  const double n = static_cast<double>(st.n);

  std::vector<std::vector<Level>> levels(groups);
  for (int a = 0; a < groups; ++a) levels[a] = rate_levels(gs.scores(a));

  struct Choice {
    std::vector<std::size_t> level;
    double residual = std::numeric_limits<double>::infinity();
    double max_gap = std::numeric_limits<double>::infinity();
    double lo_sum = 0.0;
    double hi_sum = 0.0;
  };
  Choice best;
  const double target = 0.5 * n;  // sum_a n_a q_a = n/2  <=>  sum_a t_a = 0
  std::vector<std::size_t> pick(groups);
  std::vector<double> rate(groups);
  for (std::size_t j = 0; j < levels[0].size(); ++j) {
    const double r0 = static_cast<double>(levels[0][j].above) / static_cast<double>(st.n_a[0]);
    pick[0] = j;
    double lo_sum = 0.0, hi_sum = 0.0;
    for (int a = 0; a < groups; ++a) {
      const double na = static_cast<double>(st.n_a[a]);
      if (a > 0) pick[a] = nearest_level(levels[a], na, r0);
      const Level& l = levels[a][pick[a]];
      rate[a] = static_cast<double>(l.above) / na;
      lo_sum += na * l.q_lo;
      hi_sum += na * l.q_hi;
    }
    const double residual = target < lo_sum ? lo_sum - target : (target > hi_sum ? target - hi_sum : 0.0);
    const auto [mn, mx] = std::minmax_element(rate.begin(), rate.end());
    const double gap = *mx - *mn;
    if (residual < best.residual || (residual == best.residual && gap < best.max_gap)) {
      best = {pick, residual, gap, lo_sum, hi_sum};
    }
  }

  // Spread the slack with one common fraction so that sum_a n_a q_a = n/2.
  const double span = best.hi_sum - best.lo_sum;
  double lambda = span > 0.0 ? (target - best.lo_sum) / span : 0.0;
  lambda = std::clamp(lambda, 0.0, 1.0);

  MulticlassResult out;
  std::vector<double> q(groups);
  for (int a = 0; a < groups; ++a) {
    const Level& l = levels[a][best.level[a]];
    q[a] = std::clamp(upper_inside(l, l.q_lo + lambda * (l.q_hi - l.q_lo)), 0.0, 1.0);
    const double t = (q[a] - 0.5) * 2.0 * static_cast<double>(st.n_a[a]) / n;
    out.t.push_back(t);
    out.t_sum += t;
  }
  out.rule = ThresholdRule(q);
  const EvalReport rep = evaluate(out.rule, gs);
  for (const GroupRates& g : rep.groups) out.rates.push_back(g.positive_rate);
  const auto [mn, mx] = std::minmax_element(out.rates.begin(), out.rates.end());
  out.max_gap = *mx - *mn;
  out.ddp_sum = rep.ddp_sum;
  out.accuracy = rep.accuracy;
  if (best.residual > 0.0) {
    out.diagnostic = "no rate level admits sum t_a = 0; closest level leaves sum n_a q_a off by " +
                     format_double(best.residual / n) + " n";
  }
  return out;
}

}  // namespace fairbayes
