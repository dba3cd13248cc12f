#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fairbayes/core_data.hpp"
#include "fairbayes/kv_config.hpp"

namespace fairbayes {

/// Anything that estimates eta_a(x) = P(Y = 1 | A = a, X = x).
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;
  virtual double predict_proba(std::span<const double> x, int group) const = 0;
  virtual std::size_t dimension() const = 0;
  virtual int group_count() const = 0;
};

/// Scores every row of `data`.
std::vector<double> predict_scores(const ScoreModel& model, const Dataset& data);

enum class GroupMode {
  joint,      ///< one model over features plus one-hot group columns
  per_group,  ///< an independent logistic fit per protected group
};

struct TrainingConfig {
  double learning_rate = 1.0;
  std::size_t epochs = 500;
  /// 0 means full-batch gradient descent.
  std::size_t batch_size = 0;
  /// Seeds mini-batch shuffling; unused for full-batch training.
  std::uint64_t seed = 0;
  double l2 = 0.0;
  GroupMode group_mode = GroupMode::joint;
  bool standardize = true;
};

struct LinearHead {
  std::vector<double> weights;
  double bias = 0.0;
};

/// Log-odds of one group written in the original feature units:
/// logit(eta_a(x)) = weights . x + bias.
struct AffineScore {
  std::vector<double> weights;
  double bias = 0.0;
};

class LogisticModel final : public ScoreModel {
 public:
  LogisticModel(GroupMode mode, int group_count, std::vector<double> mean,
                std::vector<double> scale, std::vector<LinearHead> heads,
                std::vector<double> training_loss = {});

  double predict_proba(std::span<const double> x, int group) const override;
  double log_odds(std::span<const double> x, int group) const;
  std::size_t dimension() const override { return mean_.size(); }
  int group_count() const override { return group_count_; }

  GroupMode mode() const noexcept { return mode_; }
  const std::vector<LinearHead>& heads() const noexcept { return heads_; }
  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<double>& scale() const noexcept { return scale_; }
  /// Mean cross-entropy on the training rows after each epoch.
  const std::vector<double>& training_loss() const noexcept { return training_loss_; }

  AffineScore affine_score(int group) const;

  KeyValueDoc to_doc() const;
  static LogisticModel from_doc(const KeyValueDoc& doc);
  void save(const std::filesystem::path& path) const;
  static LogisticModel load(const std::filesystem::path& path);

 private:
  GroupMode mode_;
  int group_count_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::vector<LinearHead> heads_;
  std::vector<double> training_loss_;
};

/// Fits eta by minimizing the mean cross-entropy with gradient descent.
///
/// Features are standardized with statistics of `data` (the training split).
/// Throws std::invalid_argument for empty data, zero features, zero epochs or
/// non-finite feature values.
LogisticModel fit_logistic(const Dataset& data, const TrainingConfig& config);

/// Number of completed fit_logistic calls in this process.
std::uint64_t logistic_fit_count() noexcept;

double sigmoid(double z) noexcept;

/// Mean cross-entropy (plus l2/2 * |w|^2) of a logistic model on a design
/// matrix. Exposed for gradient checks.
double logistic_risk(const FeatureMatrix& design, std::span<const int> labels,
                     std::span<const double> weights, double bias, double l2 = 0.0);
/// Gradient of logistic_risk; grad_w must have design.cols() entries.
void logistic_risk_gradient(const FeatureMatrix& design, std::span<const int> labels,
                            std::span<const double> weights, double bias, double l2,
                            std::span<double> grad_w, double& grad_b);

}  // namespace fairbayes
