#include "fairbayes/gaussian_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fairbayes/sup_solve.hpp"

namespace fairbayes {

namespace {

double logit(double q) { return std::log(q) - std::log1p(-q); }

double squared_norm(std::span<const double> v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_group(const GaussianPopulation& pop, int a) {
  if (a < 0 || a >= pop.group_count()) throw std::invalid_argument("group index out of range");
}

std::array<double, 2> binary_p(const GaussianPopulation& pop) {
  if (pop.group_count() != 2) throw std::invalid_argument("binary population expected");
  return {pop.p[0], pop.p[1]};
}

std::array<double, 2> binary_py(const GaussianPopulation& pop) { return {pop.p_y[0], pop.p_y[1]}; }

double stratum_tail(const GroupScoreLaw& g, int y, double z) {
  if (g.sd == 0.0) return g.mean[y] > z ? 1.0 : 0.0;
  return normal_upper_tail((z - g.mean[y]) / g.sd);
}

double group_term(const ScoreLaw& law, const GaussianPopulation& pop, Measure m, int a, double q) {
  switch (m) {
    case Measure::DP: return tail_rate(law, pop, a, q, Stratum::marginal);
    case Measure::EO: return tail_rate(law, pop, a, q, Stratum::positive);
    case Measure::PE: return tail_rate(law, pop, a, q, Stratum::negative);
    case Measure::OA:
      return tail_rate(law, pop, a, q, Stratum::positive) - tail_rate(law, pop, a, q, Stratum::negative);
  }
  return 0.0;
}

double binary_disparity(const GaussianPopulation& pop, Measure m, double q0, double q1) {
  const ScoreLaw law = score_law(pop);
  return group_term(law, pop, m, 1, q1) - group_term(law, pop, m, 0, q0);
}

}  // namespace

void GaussianPopulation::validate() const {
  const std::size_t k = p.size();
  if (k == 0) throw std::invalid_argument("population: no groups");
  if (p_y.size() != k || mu.size() != k) throw std::invalid_argument("population: inconsistent group count");
  double sum = 0.0;
  for (double v : p) {
    if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("population: group probability outside (0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("population: group probabilities must sum to 1");
  for (double v : p_y) {
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("population: positive rate outside (0, 1)");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("population: sigma must be positive");
  const std::size_t d = mu[0][0].size();
  if (d == 0) throw std::invalid_argument("population: zero dimension");
  for (const auto& pair : mu) {
    for (const auto& m : pair) {
      if (m.size() != d) throw std::invalid_argument("population: mean dimensions differ");
      for (double v : m) {
        if (!std::isfinite(v)) throw std::invalid_argument("population: non-finite mean");
      }
    }
  }
}

KeyValueDoc GaussianPopulation::to_doc() const {
  KeyValueDoc doc;
  doc.add("format", "fairbayes-gaussian-population");
  doc.add("version", "1");
  doc.add("groups", std::to_string(group_count()));
  doc.add("dimension", std::to_string(dimension()));
  doc.add("sigma", format_double(sigma));
  doc.add("p", format_doubles(p));
  doc.add("p_y", format_doubles(p_y));
  for (int a = 0; a < group_count(); ++a) {
    for (int y = 0; y < 2; ++y) {
      doc.add("mu." + std::to_string(a) + "." + std::to_string(y), format_doubles(mu[a][y]));
    }
  }
  return doc;
}

GaussianPopulation GaussianPopulation::from_doc(const KeyValueDoc& doc) {
  if (doc.require("format") != "fairbayes-gaussian-population") {
    throw std::runtime_error("not a fairbayes-gaussian-population file");
  }
  if (doc.require("version") != "1") throw std::runtime_error("unsupported population version");
  GaussianPopulation pop;
  const auto groups = parse_int(doc.require("groups"));
  if (groups < 1) throw std::runtime_error("population file: groups must be positive");
  pop.sigma = parse_double(doc.require("sigma"));
  pop.p = parse_doubles(doc.require("p"));
  pop.p_y = parse_doubles(doc.require("p_y"));
  pop.mu.resize(static_cast<std::size_t>(groups));
  for (int a = 0; a < groups; ++a) {
    for (int y = 0; y < 2; ++y) {
      pop.mu[a][y] = parse_doubles(doc.require("mu." + std::to_string(a) + "." + std::to_string(y)));
    }
  }
  if (pop.dimension() != static_cast<std::size_t>(parse_int(doc.require("dimension")))) {
    throw std::runtime_error("population file: dimension mismatch");
  }
  pop.validate();
  return pop;
}

void GaussianPopulation::save(const std::filesystem::path& path) const { to_doc().write_file(path); }

GaussianPopulation GaussianPopulation::load(const std::filesystem::path& path) {
  return from_doc(KeyValueDoc::read_file(path));
}

double normal_upper_tail(double z) noexcept { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

ScoreLaw score_law(const GaussianPopulation& pop) {
  ScoreLaw law;
  law.groups.resize(pop.p.size());
  for (int a = 0; a < pop.group_count(); ++a) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < pop.dimension(); ++j) {
      const double diff = pop.mu[a][1][j] - pop.mu[a][0][j];
      d2 += diff * diff;
    }
    const double s = std::sqrt(d2) / pop.sigma;
    const double base = logit(pop.p_y[a]);
    law.groups[a] = {{base - 0.5 * s * s, base + 0.5 * s * s}, s};
  }
  return law;
}

ScoreLaw score_law(const GaussianPopulation& pop, std::span<const AffineScore> rule_scores) {
  if (rule_scores.size() != pop.p.size()) throw std::invalid_argument("one affine score per group expected");
  ScoreLaw law;
  law.groups.resize(pop.p.size());
  for (int a = 0; a < pop.group_count(); ++a) {
    const AffineScore& r = rule_scores[a];
    if (r.weights.size() != pop.dimension()) throw std::invalid_argument("affine score dimension mismatch");
    law.groups[a].sd = pop.sigma * std::sqrt(squared_norm(r.weights));
    for (int y = 0; y < 2; ++y) law.groups[a].mean[y] = dot(r.weights, pop.mu[a][y]) + r.bias;
  }
  return law;
}

double eta(const GaussianPopulation& pop, std::span<const double> x, int a) {
  check_group(pop, a);
  if (x.size() != pop.dimension()) throw std::invalid_argument("eta: dimension mismatch");
  double d1 = 0.0, d0 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double e1 = x[j] - pop.mu[a][1][j];
    const double e0 = x[j] - pop.mu[a][0][j];
    d1 += e1 * e1;
    d0 += e0 * e0;
  }
  const double z = logit(pop.p_y[a]) + (d0 - d1) / (2.0 * pop.sigma * pop.sigma);
  return sigmoid(z);
}

double tail_rate(const ScoreLaw& law, const GaussianPopulation& pop, int a, double q, Stratum stratum) {
  check_group(pop, a);
  if (q <= 0.0) return 1.0;
  if (q >= 1.0) return 0.0;
  const double z = logit(q);
  const GroupScoreLaw& g = law.groups.at(a);
  switch (stratum) {
    case Stratum::positive: return stratum_tail(g, 1, z);
    case Stratum::negative: return stratum_tail(g, 0, z);
    case Stratum::marginal:
      return pop.p_y[a] * stratum_tail(g, 1, z) + (1.0 - pop.p_y[a]) * stratum_tail(g, 0, z);
  }
  return 0.0;
}

double tail_rate(const GaussianPopulation& pop, int a, double q, Stratum stratum) {
  return tail_rate(score_law(pop), pop, a, q, stratum);
}

EvalReport population_eval(const GaussianPopulation& pop, const ScoreLaw& law, const ThresholdRule& rule,
                           double cost) {
  if (rule.group_count() != pop.group_count()) throw std::invalid_argument("rule and population disagree on group count");
  EvalReport r;
  r.cost = cost;
  r.groups.resize(pop.p.size());
  double fp = 0.0, fn = 0.0;
  for (int a = 0; a < pop.group_count(); ++a) {
    const double q = rule.thresholds[a];
    GroupRates& g = r.groups[a];
    g.tpr = tail_rate(law, pop, a, q, Stratum::positive);
    g.fpr = tail_rate(law, pop, a, q, Stratum::negative);
    g.positive_rate = pop.p_y[a] * g.tpr + (1.0 - pop.p_y[a]) * g.fpr;
    fp += pop.p[a] * (1.0 - pop.p_y[a]) * g.fpr;
    fn += pop.p[a] * pop.p_y[a] * (1.0 - g.tpr);
    r.positive_rate += pop.p[a] * g.positive_rate;
  }
  r.accuracy = 1.0 - fp - fn;
  r.cost_risk = cost * fp + (1.0 - cost) * fn;
  for (const GroupRates& g : r.groups) r.ddp_sum += std::abs(g.positive_rate - r.positive_rate);
  if (pop.group_count() == 2) {
    const GroupRates& g0 = r.groups[0];
    const GroupRates& g1 = r.groups[1];
    r.ddp = g1.positive_rate - g0.positive_rate;
    r.deo = g1.tpr - g0.tpr;
    r.dpe = g1.fpr - g0.fpr;
    r.doa = (g1.tpr - g1.fpr) - (g0.tpr - g0.fpr);
  } else {
    r.ddp = r.deo = r.dpe = r.doa = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

double fair_accuracy(const GaussianPopulation& pop, const ThresholdRule& rule) {
  return population_eval(pop, score_law(pop), rule).accuracy;
}

double fair_risk(const GaussianPopulation& pop, const ThresholdRule& rule, double cost) {
  return population_eval(pop, score_law(pop), rule, cost).cost_risk;
}

double star(const GaussianPopulation& pop, Measure m) {
  binary_p(pop);
  return binary_disparity(pop, m, 0.5, 0.5);
}

double d_star(const GaussianPopulation& pop) { return star(pop, Measure::DP); }
double e_star(const GaussianPopulation& pop) { return star(pop, Measure::EO); }
double p_star(const GaussianPopulation& pop) { return star(pop, Measure::PE); }
double o_star(const GaussianPopulation& pop) { return star(pop, Measure::OA); }

ThresholdFamily population_family(const GaussianPopulation& pop, Measure m) {
  return ThresholdFamily::for_measure(m, binary_p(pop), binary_py(pop));
}

ThresholdFamily population_cost_family(const GaussianPopulation& pop, double cost) {
  return ThresholdFamily::cost_sensitive(cost, binary_p(pop), binary_py(pop));
}

double population_disparity(const GaussianPopulation& pop, const ThresholdFamily& family, double t) {
  return binary_disparity(pop, family.measure(), family.threshold_clamped(0, t), family.threshold_clamped(1, t));
}

OracleSolution oracle_solve(const GaussianPopulation& pop, const ThresholdFamily& family, double delta,
                            double tol) {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  const ScoreLaw law = score_law(pop);
  const Measure m = family.measure();
  auto disparity_at = [&](double t) {
    const double q0 = family.threshold_clamped(0, t);
    const double q1 = family.threshold_clamped(1, t);
    return group_term(law, pop, m, 1, q1) - group_term(law, pop, m, 0, q0);
  };

  OracleSolution sol;
  const double initial = disparity_at(0.0);
  if (std::abs(initial) > delta) {
    const double target = initial > 0.0 ? delta : -delta;
    const SupResult r = sup_solve_bisection(disparity_at, target, family.bracket(), tol);
    if (!r.crossed) {
      throw std::runtime_error("oracle: no crossing of the disparity target inside the bracket");
    }
    sol.t = r.t;
    sol.evaluations = r.evaluations;
  }
  sol.rule = ThresholdRule({family.threshold_clamped(0, sol.t), family.threshold_clamped(1, sol.t)});
  const EvalReport rep = population_eval(pop, law, sol.rule, family.cost());
  sol.disparity = rep.disparity(m);
  sol.accuracy = rep.accuracy;
  sol.cost_risk = rep.cost_risk;
  return sol;
}

OracleSolution oracle_rule(const GaussianPopulation& pop, Measure m, double delta) {
  return oracle_solve(pop, population_family(pop, m), delta);
}

double t_star(const GaussianPopulation& pop, Measure m, double delta) {
  return oracle_rule(pop, m, delta).t;
}

OracleSolution oracle_cost_sensitive(const GaussianPopulation& pop, double cost, double delta) {
  return oracle_solve(pop, population_cost_family(pop, cost), delta);
}

TauStar tau_star(BoundaryMass group1, BoundaryMass group0, double target) {
  constexpr double slack = 1e-12;
  auto checked = [](double tau) {
    if (!(tau >= -slack && tau <= 1.0 + slack)) {
      throw std::domain_error("tau_star: randomization constant outside [0, 1]");
    }
    return std::clamp(tau, 0.0, 1.0);
  };
  TauStar r;
  const bool atom1 = group1.atom != 0.0;
  const bool atom0 = group0.atom != 0.0;
  if (!atom1 && !atom0) return r;
  if (atom1 && !atom0) {
    r.boundary_case = 2;
    r.tau1 = checked((group0.tail + target - group1.tail) / group1.atom);
    return r;
  }
  r.boundary_case = atom1 ? 4 : 3;
  r.tau0 = checked((group1.tail - group0.tail - target) / group0.atom);
  return r;
}

MulticlassOracle oracle_multiclass_dp(const GaussianPopulation& pop, double tol) {
  pop.validate();
  const ScoreLaw law = score_law(pop);
  const int groups = pop.group_count();

  // Threshold of group a at which its positive rate equals s, in logit space.
  auto threshold_for_rate = [&](int a, double s) {
    double lo = -60.0, hi = 60.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (tail_rate(law, pop, a, sigmoid(mid), Stratum::marginal) > s) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return sigmoid(0.5 * (lo + hi));
  };
  // sum_a t_a with t_a = (q_a - 1/2) 2 p_a; non-increasing in s.
  auto t_sum = [&](double s) {
    double sum = 0.0;
    for (int a = 0; a < groups; ++a) sum += (threshold_for_rate(a, s) - 0.5) * 2.0 * pop.p[a];
    return sum;
  };
  const SupResult r = sup_solve_bisection(t_sum, 0.0, {0.0, 1.0}, tol);
  if (!r.crossed) throw std::runtime_error("multiclass oracle: no common rate found");

  MulticlassOracle out;
  out.rate = r.t;
  for (int a = 0; a < groups; ++a) {
    const double q = threshold_for_rate(a, out.rate);
    out.thresholds.push_back(q);
    out.t.push_back((q - 0.5) * 2.0 * pop.p[a]);
  }
  out.accuracy = population_eval(pop, law, ThresholdRule(out.thresholds)).accuracy;
  return out;
}

}  // namespace fairbayes
