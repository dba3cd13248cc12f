#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairbayes {

/// Dense row-major matrix of real-valued features.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) noexcept {
    return {values_.data() + i * cols_, cols_};
  }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }

  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Feature rows with a protected-group code and a binary outcome per row.
///
/// Group codes are dense integers in [0, group_count). In the binary case
/// group 1 is the group whose rate enters DDP with a positive sign.
class Dataset {
 public:
  Dataset() = default;
  /// Throws std::invalid_argument when the row counts disagree, a label is not
  /// 0/1, or a group code is outside [0, group_count). `group_count == 0`
  /// means "infer as max(group) + 1".
  Dataset(FeatureMatrix features, std::vector<int> group, std::vector<int> label,
          int group_count = 0);

  std::size_t size() const noexcept { return label_.size(); }
  bool empty() const noexcept { return label_.empty(); }
  std::size_t dimension() const noexcept { return features_.cols(); }
  int group_count() const noexcept { return group_count_; }

  const FeatureMatrix& features() const noexcept { return features_; }
  const std::vector<int>& group() const noexcept { return group_; }
  const std::vector<int>& label() const noexcept { return label_; }

  /// Rows picked by `indices`, in that order. Keeps group_count.
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  FeatureMatrix features_;
  std::vector<int> group_;
  std::vector<int> label_;
  int group_count_ = 0;
};

/// Empirical counts and plug-in rates of the protected groups.
struct GroupStats {
  std::size_t n = 0;
  std::vector<std::size_t> n_a;                  // per group
  std::vector<std::array<std::size_t, 2>> n_ay;  // per group, per label

  int group_count() const noexcept { return static_cast<int>(n_a.size()); }
  /// n_a / n
  double p_hat_a(int a) const;
  /// n_{a,1} / n_a
  double p_hat_Ya(int a) const;
  /// n_{a,y} / n, i.e. the joint frequency of (A=a, Y=y).
  double p_hat_ay(int a, int y) const;
};

/// Throws std::invalid_argument("empty dataset") for n = 0 and
/// std::invalid_argument("empty protected group") if some group has no rows.
GroupStats group_stats(const Dataset& data);
GroupStats group_stats(std::span<const int> group, std::span<const int> label, int group_count);

enum class Measure { DP, EO, PE, OA };

std::string_view to_string(Measure m);
/// Accepts "dp", "eo", "pe", "oa" in any case.
Measure parse_measure(std::string_view text);

struct FairnessConstraint {
  Measure measure = Measure::DP;
  double delta = 0.0;
  /// Misclassification cost c of R_c; only used with DP.
  double cost = 0.5;

  void validate() const;
};

/// Per-group cut q_a on the score plus the probability of predicting 1 when
/// the score equals q_a exactly.
struct ThresholdRule {
  std::vector<double> thresholds;
  std::vector<double> tie_prob;

  ThresholdRule() = default;
  explicit ThresholdRule(std::vector<double> q);
  ThresholdRule(std::vector<double> q, std::vector<double> tau);

  int group_count() const noexcept { return static_cast<int>(thresholds.size()); }
  /// Probability of predicting 1 for a point of group `a` with score `score`.
  double predict(double score, int a) const;
  void validate() const;
};

struct GroupRates {
  double positive_rate = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

/// Classifier evaluation on one sample.
///
/// ddp/deo/dpe/doa are group-1-minus-group-0 differences and are only
/// populated for binary protected attributes (NaN otherwise). ddp_sum is
/// sum_a |P(Yhat=1|A=a) - P(Yhat=1)| and is populated for any group count.
struct EvalReport {
  double accuracy = 0.0;
  double cost = 0.5;
  double cost_risk = 0.0;
  double ddp = 0.0;
  double deo = 0.0;
  double dpe = 0.0;
  double doa = 0.0;
  double ddp_sum = 0.0;
  double positive_rate = 0.0;
  std::vector<GroupRates> groups;

  double disparity(Measure m) const;
};

}  // namespace fairbayes
