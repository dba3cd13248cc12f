#include "fairbayes/fairness_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fairbayes/score_models.hpp"

namespace fairbayes {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Counts {
  std::size_t above = 0;
  std::size_t equal = 0;
};

Counts count_at(std::span<const double> sorted, double q) {
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), q);
  const auto hi = std::upper_bound(lo, sorted.end(), q);
  return {static_cast<std::size_t>(sorted.end() - hi), static_cast<std::size_t>(hi - lo)};
}

double expected_positives(std::span<const double> sorted, double q, double tau) {
  const Counts c = count_at(sorted, q);
  return static_cast<double>(c.above) + tau * static_cast<double>(c.equal);
}

double rate_or_nan(std::span<const double> sorted, double q, double tau) {
  if (sorted.empty()) return kNaN;
  return expected_positives(sorted, q, tau) / static_cast<double>(sorted.size());
}

std::array<double, 2> plugin_p(const GroupedScores& gs) {
  if (gs.group_count() != 2) throw std::invalid_argument("disparity functions need exactly two groups");
  return {gs.stats().p_hat_a(0), gs.stats().p_hat_a(1)};
}

std::array<double, 2> plugin_py(const GroupedScores& gs) {
  return {gs.stats().p_hat_Ya(0), gs.stats().p_hat_Ya(1)};
}

bool close_t(double a, double b) {
  return std::abs(a - b) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a));
}

}  // namespace

GroupedScores::GroupedScores(std::span<const double> scores, std::span<const int> group,
                             std::span<const int> label, int group_count)
    : stats_(group_stats(group, label, group_count)) {
  if (scores.size() != group.size()) throw std::invalid_argument("scores and groups differ in length");
  strata_.resize(static_cast<std::size_t>(group_count));
  all_.resize(static_cast<std::size_t>(group_count));
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = scores[i];
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("score outside [0, 1]");
    strata_[group[i]][label[i]].push_back(s);
    all_[group[i]].push_back(s);
  }
  for (int a = 0; a < group_count; ++a) {
    std::sort(all_[a].begin(), all_[a].end());
    for (auto& v : strata_[a]) std::sort(v.begin(), v.end());
  }
}

GroupedScores GroupedScores::from_model(const ScoreModel& model, const Dataset& data) {
  const std::vector<double> s = predict_scores(model, data);
  return GroupedScores(s, data.group(), data.label(), data.group_count());
}

double positive_rate(std::span<const double> sorted_scores, double q, double tau) {
  if (sorted_scores.empty()) throw std::invalid_argument("positive_rate: empty score list");
  return expected_positives(sorted_scores, q, tau) / static_cast<double>(sorted_scores.size());
}

std::size_t atom_count(std::span<const double> sorted_scores, double q) {
  return count_at(sorted_scores, q).equal;
}

DisparityFunction::DisparityFunction(const GroupedScores& gs, ThresholdFamily family)
    : gs_(&gs), family_(family) {
  build_breakpoints();
  build_jump_parameters();
}

DisparityFunction::DisparityFunction(const GroupedScores& gs, Measure measure)
    : DisparityFunction(gs, ThresholdFamily::for_measure(measure, plugin_p(gs), plugin_py(gs))) {}

DisparityFunction DisparityFunction::cost_sensitive(const GroupedScores& gs, double c) {
  return DisparityFunction(gs, ThresholdFamily::cost_sensitive(c, plugin_p(gs), plugin_py(gs)));
}

void DisparityFunction::build_breakpoints() {
  struct Jump {
    double t;
    int group;
    double q;
  };
  std::vector<Jump> jumps;
  const Bracket b = family_.bracket();
  for (int a = 0; a < 2; ++a) {
    std::vector<std::span<const double>> lists;
    switch (family_.kind()) {
      case ThresholdFamily::Kind::eo: lists = {gs_->scores(a, 1)}; break;
      case ThresholdFamily::Kind::pe: lists = {gs_->scores(a, 0)}; break;
      case ThresholdFamily::Kind::oa: lists = {gs_->scores(a, 1), gs_->scores(a, 0)}; break;
      default: lists = {gs_->scores(a)}; break;
    }
    for (const auto& list : lists) {
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (i > 0 && list[i] == list[i - 1]) continue;
        const double t = family_.parameter_at(a, list[i]);
        if (std::isfinite(t) && t > b.lo && t < b.hi) jumps.push_back({t, a, list[i]});
      }
    }
  }
  std::sort(jumps.begin(), jumps.end(), [](const Jump& x, const Jump& y) { return x.t < y.t; });
  for (const Jump& j : jumps) {
    if (!breakpoint_t_.empty() && close_t(breakpoint_t_.back(), j.t)) {
      auto& q = breakpoint_q_.back();
      if (std::isnan(q[j.group])) {
        q[j.group] = j.q;
        continue;
      }
      if (q[j.group] == j.q) continue;
    }
    std::array<double, 2> q{kNaN, kNaN};
    q[j.group] = j.q;
    breakpoint_t_.push_back(j.t);
    breakpoint_q_.push_back(q);
  }
}

void DisparityFunction::build_jump_parameters() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Bracket b = family_.bracket();
  for (int a = 0; a < 2; ++a) {
    const double q_lo = family_.threshold_clamped(a, b.lo);
    const double q_hi = family_.threshold_clamped(a, b.hi);
    direction_[a] = q_hi < q_lo ? -1 : 1;
    const bool constant = q_hi == q_lo;
    for (int y = 0; y < 2; ++y) {
      std::vector<double>& out = jump_t_[a][y];
      out.clear();
      for (double s : gs_->scores(a, y)) {
        double t;
        if (constant) {
          t = s > q_lo ? inf : -inf;
        } else if (direction_[a] > 0) {
          t = s > q_hi ? inf : (s <= q_lo ? b.lo : std::clamp(family_.parameter_at(a, s), b.lo, b.hi));
        } else {
          t = s > q_lo ? -inf : (s <= q_hi ? b.hi : std::clamp(family_.parameter_at(a, s), b.lo, b.hi));
        }
        out.push_back(t);
      }
      std::sort(out.begin(), out.end());
    }
  }
}

double DisparityFunction::counted_term(int a, double t) const {
  auto rate = [&](int y) {
    const std::vector<double>& v = jump_t_[a][y];
    const std::size_t hits = direction_[a] > 0
                                 ? static_cast<std::size_t>(v.end() - std::upper_bound(v.begin(), v.end(), t))
                                 : static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), t) - v.begin());
    return static_cast<double>(hits);
  };
  const GroupStats& st = gs_->stats();
  const auto frac = [](double hits, std::size_t size) { return hits / static_cast<double>(size); };
  switch (family_.kind()) {
    case ThresholdFamily::Kind::eo: return frac(rate(1), st.n_ay[a][1]);
    case ThresholdFamily::Kind::pe: return frac(rate(0), st.n_ay[a][0]);
    case ThresholdFamily::Kind::oa: return frac(rate(1), st.n_ay[a][1]) - frac(rate(0), st.n_ay[a][0]);
    default: return frac(rate(0) + rate(1), st.n_a[a]);
  }
}

std::array<double, 2> DisparityFunction::snapped(std::size_t k, double t) const {
  std::array<double, 2> q = breakpoint_q_[k];
  for (int a = 0; a < 2; ++a) {
    if (std::isnan(q[a])) q[a] = family_.threshold(a, t);
  }
  return q;
}

std::array<double, 2> DisparityFunction::thresholds(double t) const {
  const auto it = std::lower_bound(breakpoint_t_.begin(), breakpoint_t_.end(), t);
  if (it != breakpoint_t_.end() && *it == t) {
    return snapped(static_cast<std::size_t>(it - breakpoint_t_.begin()), t);
  }
  return {family_.threshold(0, t), family_.threshold(1, t)};
}

std::array<double, 2> DisparityFunction::thresholds_clamped(double t) const {
  if (family_.clamps()) return thresholds(t);
  const Bracket b = family_.bracket();
  return thresholds(std::clamp(t, b.lo, b.hi));
}

double DisparityFunction::group_term(int a, double q, double tau) const {
  switch (family_.kind()) {
    case ThresholdFamily::Kind::eo: return positive_rate(gs_->scores(a, 1), q, tau);
    case ThresholdFamily::Kind::pe: return positive_rate(gs_->scores(a, 0), q, tau);
    case ThresholdFamily::Kind::oa:
      return positive_rate(gs_->scores(a, 1), q, tau) - positive_rate(gs_->scores(a, 0), q, tau);
    default: return positive_rate(gs_->scores(a), q, tau);
  }
}

double DisparityFunction::atom_weight(int a, double q) const {
  auto w = [q](std::span<const double> s) {
    return static_cast<double>(atom_count(s, q)) / static_cast<double>(s.size());
  };
  switch (family_.kind()) {
    case ThresholdFamily::Kind::eo: return w(gs_->scores(a, 1));
    case ThresholdFamily::Kind::pe: return w(gs_->scores(a, 0));
    case ThresholdFamily::Kind::oa: return w(gs_->scores(a, 1)) - w(gs_->scores(a, 0));
    default: return w(gs_->scores(a));
  }
}

double DisparityFunction::operator()(double t) const {
  const Bracket b = family_.bracket();
  if (family_.clamps()) {
    t = std::clamp(t, b.lo, b.hi);
  } else if (t < b.lo || t > b.hi) {
    throw std::domain_error("threshold out of range");
  }
  std::array<double, 2> q{kNaN, kNaN};
  const auto it = std::lower_bound(breakpoint_t_.begin(), breakpoint_t_.end(), t);
  if (it != breakpoint_t_.end() && *it == t) q = breakpoint_q_[static_cast<std::size_t>(it - breakpoint_t_.begin())];
  auto term = [&](int a) { return std::isnan(q[a]) ? counted_term(a, t) : group_term(a, q[a]); };
  return term(1) - term(0);
}

double DisparityFunction::disparity(const ThresholdRule& rule) const {
  if (rule.group_count() != 2) throw std::invalid_argument("binary rule expected");
  const double tau0 = rule.tie_prob.empty() ? 0.0 : rule.tie_prob[0];
  const double tau1 = rule.tie_prob.empty() ? 0.0 : rule.tie_prob[1];
  return group_term(1, rule.thresholds[1], tau1) - group_term(0, rule.thresholds[0], tau0);
}

double ddp_hat(const GroupedScores& gs, double t) { return DisparityFunction(gs, Measure::DP)(t); }
double deo_hat(const GroupedScores& gs, double t) { return DisparityFunction(gs, Measure::EO)(t); }
double dpe_hat(const GroupedScores& gs, double t) { return DisparityFunction(gs, Measure::PE)(t); }
double doa_hat(const GroupedScores& gs, double t) { return DisparityFunction(gs, Measure::OA)(t); }

EvalReport evaluate(const ThresholdRule& rule, const GroupedScores& gs, double cost) {
  rule.validate();
  const int groups = gs.group_count();
  if (rule.group_count() != groups) throw std::invalid_argument("rule and data disagree on group count");
  if (!(cost >= 0.0 && cost <= 1.0)) throw std::invalid_argument("cost must lie in [0, 1]");

  EvalReport r;
  r.cost = cost;
  r.groups.resize(static_cast<std::size_t>(groups));
  const GroupStats& st = gs.stats();
  double tp = 0.0, fp = 0.0;
  double total_pos_pred = 0.0;
  double pos = 0.0, neg = 0.0;
  for (int a = 0; a < groups; ++a) {
    const double q = rule.thresholds[a];
    const double tau = rule.tie_prob.empty() ? 0.0 : rule.tie_prob[a];
    const double tp_a = expected_positives(gs.scores(a, 1), q, tau);
    const double fp_a = expected_positives(gs.scores(a, 0), q, tau);
    GroupRates& g = r.groups[a];
    g.positive_rate = (tp_a + fp_a) / static_cast<double>(st.n_a[a]);
    g.tpr = rate_or_nan(gs.scores(a, 1), q, tau);
    g.fpr = rate_or_nan(gs.scores(a, 0), q, tau);
    tp += tp_a;
    fp += fp_a;
    total_pos_pred += tp_a + fp_a;
    pos += static_cast<double>(st.n_ay[a][1]);
    neg += static_cast<double>(st.n_ay[a][0]);
  }
  const double n = static_cast<double>(st.n);
  const double fn = pos - tp;
  r.accuracy = (tp + (neg - fp)) / n;
  r.cost_risk = (cost * fp + (1.0 - cost) * fn) / n;
  r.positive_rate = total_pos_pred / n;
  for (const GroupRates& g : r.groups) r.ddp_sum += std::abs(g.positive_rate - r.positive_rate);
  if (groups == 2) {
    const GroupRates& g0 = r.groups[0];
    const GroupRates& g1 = r.groups[1];
    r.ddp = g1.positive_rate - g0.positive_rate;
    r.deo = g1.tpr - g0.tpr;
    r.dpe = g1.fpr - g0.fpr;
    r.doa = (g1.tpr - g1.fpr) - (g0.tpr - g0.fpr);
  } else {
    r.ddp = r.deo = r.dpe = r.doa = kNaN;
  }
  return r;
}

double plugin_accuracy(const ThresholdRule& rule, const GroupedScores& gs) {
  if (rule.group_count() != gs.group_count()) throw std::invalid_argument("rule and data disagree on group count");
  double sum = 0.0;
  for (int a = 0; a < gs.group_count(); ++a) {
    for (double s : gs.scores(a)) {
      const double f = rule.predict(s, a);
      sum += f * s + (1.0 - f) * (1.0 - s);
    }
  }
  return sum / static_cast<double>(gs.stats().n);
}

double plugin_cost_risk(const ThresholdRule& rule, const GroupedScores& gs, double cost) {
  if (rule.group_count() != gs.group_count()) throw std::invalid_argument("rule and data disagree on group count");
  double sum = 0.0;
  for (int a = 0; a < gs.group_count(); ++a) {
    for (double s : gs.scores(a)) {
      const double f = rule.predict(s, a);
      sum += cost * f * (1.0 - s) + (1.0 - cost) * (1.0 - f) * s;
    }
  }
  return sum / static_cast<double>(gs.stats().n);
}

}  // namespace fairbayes
