#include "fairbayes/core_data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace fairbayes {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw std::invalid_argument("feature matrix: value count does not match rows x cols");
  }
}

Dataset::Dataset(FeatureMatrix features, std::vector<int> group, std::vector<int> label,
                 int group_count)
    : features_(std::move(features)), group_(std::move(group)), label_(std::move(label)) {
  if (group_.size() != label_.size() || features_.rows() != label_.size()) {
    throw std::invalid_argument("dataset: features, group and label row counts differ");
  }
  int max_group = -1;
  for (int g : group_) {
    if (g < 0) throw std::invalid_argument("dataset: negative group code");
    max_group = std::max(max_group, g);
  }
  group_count_ = group_count > 0 ? group_count : max_group + 1;
  if (max_group >= group_count_) {
    throw std::invalid_argument("dataset: group code outside [0, group_count)");
  }
  for (int y : label_) {
    if (y != 0 && y != 1) throw std::invalid_argument("dataset: label must be 0 or 1");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  const std::size_t d = dimension();
  std::vector<double> values;
  values.reserve(indices.size() * d);
  std::vector<int> g;
  std::vector<int> y;
  g.reserve(indices.size());
  y.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) throw std::out_of_range("dataset subset index");
    auto r = features_.row(i);
    values.insert(values.end(), r.begin(), r.end());
    g.push_back(group_[i]);
    y.push_back(label_[i]);
  }
  return Dataset(FeatureMatrix(indices.size(), d, std::move(values)), std::move(g), std::move(y),
                 group_count_);
}

double GroupStats::p_hat_a(int a) const {
  return static_cast<double>(n_a.at(a)) / static_cast<double>(n);
}

double GroupStats::p_hat_Ya(int a) const {
  return static_cast<double>(n_ay.at(a)[1]) / static_cast<double>(n_a.at(a));
}

double GroupStats::p_hat_ay(int a, int y) const {
  return static_cast<double>(n_ay.at(a).at(y)) / static_cast<double>(n);
}

GroupStats group_stats(std::span<const int> group, std::span<const int> label, int group_count) {
  if (group.empty()) throw std::invalid_argument("empty dataset");
  if (group.size() != label.size()) throw std::invalid_argument("group/label size mismatch");
  if (group_count < 1) throw std::invalid_argument("group_count must be positive");
  GroupStats s;
  s.n = group.size();
  s.n_a.assign(group_count, 0);
  s.n_ay.assign(group_count, {0, 0});
  for (std::size_t i = 0; i < group.size(); ++i) {
    const int a = group[i];
    const int y = label[i];
    if (a < 0 || a >= group_count) throw std::invalid_argument("group code outside range");
    if (y != 0 && y != 1) throw std::invalid_argument("label must be 0 or 1");
    ++s.n_a[a];
    ++s.n_ay[a][y];
  }
  for (std::size_t c : s.n_a) {
    if (c == 0) throw std::invalid_argument("empty protected group");
  }
  return s;
}

GroupStats group_stats(const Dataset& data) {
  return group_stats(data.group(), data.label(), data.group_count());
}

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::DP: return "dp";
    case Measure::EO: return "eo";
    case Measure::PE: return "pe";
    case Measure::OA: return "oa";
  }
  return "?";
}

Measure parse_measure(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "dp") return Measure::DP;
  if (lower == "eo") return Measure::EO;
  if (lower == "pe") return Measure::PE;
  if (lower == "oa") return Measure::OA;
  throw std::invalid_argument("unknown fairness measure '" + std::string(text) + "'");
}

void FairnessConstraint::validate() const {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  if (!(cost >= 0.0 && cost <= 1.0)) throw std::invalid_argument("cost must lie in [0, 1]");
}

ThresholdRule::ThresholdRule(std::vector<double> q)
    : thresholds(std::move(q)), tie_prob(thresholds.size(), 0.0) {}

ThresholdRule::ThresholdRule(std::vector<double> q, std::vector<double> tau)
    : thresholds(std::move(q)), tie_prob(std::move(tau)) {
  if (tie_prob.size() != thresholds.size()) {
    throw std::invalid_argument("threshold rule: tie_prob size differs from thresholds");
  }
}

double ThresholdRule::predict(double score, int a) const {
  const double q = thresholds[a];
  if (score > q) return 1.0;
  if (score == q) return tie_prob[a];
  return 0.0;
}

void ThresholdRule::validate() const {
  if (tie_prob.size() != thresholds.size()) {
    throw std::invalid_argument("threshold rule: tie_prob size differs from thresholds");
  }
  for (std::size_t a = 0; a < thresholds.size(); ++a) {
    if (!(thresholds[a] >= 0.0 && thresholds[a] <= 1.0)) {
      throw std::invalid_argument("threshold rule: q_a outside [0, 1]");
    }
    if (!(tie_prob[a] >= 0.0 && tie_prob[a] <= 1.0)) {
      throw std::invalid_argument("threshold rule: tau_a outside [0, 1]");
    }
  }
}

double EvalReport::disparity(Measure m) const {
  switch (m) {
    case Measure::DP: return ddp;
    case Measure::EO: return deo;
    case Measure::PE: return dpe;
    case Measure::OA: return doa;
  }
  return std::nan("");
}

}  // namespace fairbayes
