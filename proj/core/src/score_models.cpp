#include "fairbayes/score_models.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fairbayes/random.hpp"

namespace fairbayes {

namespace {

std::atomic<std::uint64_t> g_fit_count{0};

// log(1 + exp(z)) without overflow.
double softplus(double z) noexcept {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;
};

Standardizer fit_standardizer(const FeatureMatrix& x, bool enabled) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
  if (!enabled) return s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += x(i, j);
  }
  for (double& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = x(i, j) - s.mean[j];
      var[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    s.scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

// Design rows: standardized features, then optionally one-hot group columns.
FeatureMatrix build_design(const Dataset& data, std::span<const std::size_t> rows,
                           const Standardizer& st, int onehot_groups) {
  const std::size_t d = data.dimension();
  const std::size_t width = d + static_cast<std::size_t>(onehot_groups);
  FeatureMatrix design(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto x = data.features().row(rows[r]);
    auto out = design.row(r);
    for (std::size_t j = 0; j < d; ++j) out[j] = (x[j] - st.mean[j]) / st.scale[j];
    if (onehot_groups > 0) out[d + data.group()[rows[r]]] = 1.0;
  }
  return design;
}

double linear(std::span<const double> row, std::span<const double> w, double b) noexcept {
  double z = b;
  for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * row[j];
  return z;
}

struct TrainedHead {
  LinearHead head;
  std::vector<double> loss;
};

TrainedHead train_head(const FeatureMatrix& design, std::span<const int> labels,
                       const TrainingConfig& cfg, std::uint64_t seed) {
  const std::size_t n = design.rows();
  const std::size_t p = design.cols();
  TrainedHead out;
  out.head.weights.assign(p, 0.0);
  out.loss.reserve(cfg.epochs);
  std::vector<double> gw(p, 0.0);
  double gb = 0.0;

  const bool full_batch = cfg.batch_size == 0 || cfg.batch_size >= n;
  if (full_batch) {
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      logistic_risk_gradient(design, labels, out.head.weights, out.head.bias, cfg.l2, gw, gb);
      for (std::size_t j = 0; j < p; ++j) out.head.weights[j] -= cfg.learning_rate * gw[j];
      out.head.bias -= cfg.learning_rate * gb;
      out.loss.push_back(logistic_risk(design, labels, out.head.weights, out.head.bias, cfg.l2));
    }
    return out;
  }

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      std::fill(gw.begin(), gw.end(), 0.0);
      gb = 0.0;
      for (std::size_t k = start; k < stop; ++k) {
        auto row = design.row(order[k]);
        const double r = sigmoid(linear(row, out.head.weights, out.head.bias)) - labels[order[k]];
        for (std::size_t j = 0; j < p; ++j) gw[j] += r * row[j];
        gb += r;
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t j = 0; j < p; ++j) {
        out.head.weights[j] -= cfg.learning_rate * (gw[j] * inv + cfg.l2 * out.head.weights[j]);
      }
      out.head.bias -= cfg.learning_rate * gb * inv;
    }
    out.loss.push_back(logistic_risk(design, labels, out.head.weights, out.head.bias, cfg.l2));
  }
  return out;
}

std::string_view mode_name(GroupMode m) { return m == GroupMode::joint ? "joint" : "per_group"; }

}  // namespace

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_risk(const FeatureMatrix& design, std::span<const int> labels,
                     std::span<const double> weights, double bias, double l2) {
  const std::size_t n = design.rows();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = linear(design.row(i), weights, bias);
    // -[y log s(z) + (1-y) log(1-s(z))] = softplus(z) - y z
    total += softplus(z) - labels[i] * z;
  }
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  return total / static_cast<double>(n) + 0.5 * l2 * reg;
}

void logistic_risk_gradient(const FeatureMatrix& design, std::span<const int> labels,
                            std::span<const double> weights, double bias, double l2,
                            std::span<double> grad_w, double& grad_b) {
  const std::size_t n = design.rows();
  const std::size_t p = design.cols();
  if (grad_w.size() != p) throw std::invalid_argument("gradient buffer size mismatch");
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  grad_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = design.row(i);
    const double r = sigmoid(linear(row, weights, bias)) - labels[i];
    for (std::size_t j = 0; j < p; ++j) grad_w[j] += r * row[j];
    grad_b += r;
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < p; ++j) grad_w[j] = grad_w[j] * inv + l2 * weights[j];
  grad_b *= inv;
}

std::vector<double> predict_scores(const ScoreModel& model, const Dataset& data) {
  if (data.dimension() != model.dimension()) {
    throw std::invalid_argument("predict: dimension mismatch");
  }
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = model.predict_proba(data.features().row(i), data.group()[i]);
  }
  return out;
}

LogisticModel::LogisticModel(GroupMode mode, int group_count, std::vector<double> mean,
                             std::vector<double> scale, std::vector<LinearHead> heads,
                             std::vector<double> training_loss)
    : mode_(mode),
      group_count_(group_count),
      mean_(std::move(mean)),
      scale_(std::move(scale)),
      heads_(std::move(heads)),
      training_loss_(std::move(training_loss)) {
  const std::size_t d = mean_.size();
  if (scale_.size() != d) throw std::invalid_argument("logistic model: scale size mismatch");
  if (group_count_ < 1) throw std::invalid_argument("logistic model: group_count must be >= 1");
  const std::size_t expected_heads = mode_ == GroupMode::joint ? 1 : group_count_;
  const std::size_t expected_width = mode_ == GroupMode::joint ? d + group_count_ : d;
  if (heads_.size() != expected_heads) {
    throw std::invalid_argument("logistic model: wrong number of heads");
  }
  for (const auto& h : heads_) {
    if (h.weights.size() != expected_width) {
      throw std::invalid_argument("logistic model: weight vector length mismatch");
    }
    for (double w : h.weights) {
      if (!std::isfinite(w)) throw std::invalid_argument("logistic model: non-finite weight");
    }
    if (!std::isfinite(h.bias)) throw std::invalid_argument("logistic model: non-finite bias");
  }
}

double LogisticModel::log_odds(std::span<const double> x, int group) const {
  const std::size_t d = dimension();
  if (x.size() != d) throw std::invalid_argument("predict_proba: dimension mismatch");
  if (group < 0 || group >= group_count_) {
    throw std::invalid_argument("predict_proba: group outside range");
  }
  const LinearHead& h = mode_ == GroupMode::joint ? heads_[0] : heads_[group];
  double z = h.bias;
  for (std::size_t j = 0; j < d; ++j) z += h.weights[j] * (x[j] - mean_[j]) / scale_[j];
  if (mode_ == GroupMode::joint) z += h.weights[d + group];
  return z;
}

double LogisticModel::predict_proba(std::span<const double> x, int group) const {
  return sigmoid(log_odds(x, group));
}

AffineScore LogisticModel::affine_score(int group) const {
  const std::size_t d = dimension();
  const LinearHead& h = mode_ == GroupMode::joint ? heads_.at(0) : heads_.at(group);
  AffineScore s;
  s.weights.resize(d);
  s.bias = h.bias;
  for (std::size_t j = 0; j < d; ++j) {
    s.weights[j] = h.weights[j] / scale_[j];
    s.bias -= s.weights[j] * mean_[j];
  }
  if (mode_ == GroupMode::joint) s.bias += h.weights[d + group];
  return s;
}

KeyValueDoc LogisticModel::to_doc() const {
  KeyValueDoc doc;
  doc.add("format", "fairbayes-logistic");
  doc.add("version", "1");
  doc.add("mode", std::string(mode_name(mode_)));
  doc.add("dimension", std::to_string(dimension()));
  doc.add("group_count", std::to_string(group_count_));
  doc.add("mean", format_doubles(mean_));
  doc.add("scale", format_doubles(scale_));
  for (std::size_t k = 0; k < heads_.size(); ++k) {
    doc.add("head." + std::to_string(k) + ".bias", format_double(heads_[k].bias));
    doc.add("head." + std::to_string(k) + ".weights", format_doubles(heads_[k].weights));
  }
  return doc;
}

LogisticModel LogisticModel::from_doc(const KeyValueDoc& doc) {
  if (doc.require("format") != "fairbayes-logistic") {
    throw std::runtime_error("not a fairbayes-logistic model file");
  }
  if (doc.require("version") != "1") throw std::runtime_error("unsupported model version");
  const std::string mode_text = doc.require("mode");
  GroupMode mode;
  if (mode_text == "joint") {
    mode = GroupMode::joint;
  } else if (mode_text == "per_group") {
    mode = GroupMode::per_group;
  } else {
    throw std::runtime_error("unknown model mode '" + mode_text + "'");
  }
  const auto d = static_cast<std::size_t>(parse_int(doc.require("dimension")));
  const int groups = static_cast<int>(parse_int(doc.require("group_count")));
  auto mean = parse_doubles(doc.require("mean"));
  auto scale = parse_doubles(doc.require("scale"));
  if (mean.size() != d) throw std::runtime_error("model file: mean has wrong length");
  const std::size_t head_count = mode == GroupMode::joint ? 1 : groups;
  std::vector<LinearHead> heads(head_count);
  for (std::size_t k = 0; k < head_count; ++k) {
    heads[k].bias = parse_double(doc.require("head." + std::to_string(k) + ".bias"));
    heads[k].weights = parse_doubles(doc.require("head." + std::to_string(k) + ".weights"));
  }
  return LogisticModel(mode, groups, std::move(mean), std::move(scale), std::move(heads));
}

void LogisticModel::save(const std::filesystem::path& path) const { to_doc().write_file(path); }

LogisticModel LogisticModel::load(const std::filesystem::path& path) {
  return from_doc(KeyValueDoc::read_file(path));
}

LogisticModel fit_logistic(const Dataset& data, const TrainingConfig& config) {
  if (data.empty()) throw std::invalid_argument("fit_logistic: empty dataset");
  if (data.dimension() == 0) throw std::invalid_argument("fit_logistic: no features");
  if (config.epochs == 0) throw std::invalid_argument("fit_logistic: zero epochs");
  if (!(config.learning_rate > 0.0)) {
    throw std::invalid_argument("fit_logistic: learning rate must be positive");
  }
  for (double v : data.features().values()) {
    if (!std::isfinite(v)) throw std::invalid_argument("fit_logistic: non-finite feature value");
  }

  const Standardizer st = fit_standardizer(data.features(), config.standardize);
  const int groups = data.group_count();
  std::vector<LinearHead> heads;
  std::vector<double> loss;

  if (config.group_mode == GroupMode::joint) {
    std::vector<std::size_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const FeatureMatrix design = build_design(data, rows, st, groups);
    auto trained = train_head(design, data.label(), config, config.seed);
    heads.push_back(std::move(trained.head));
    loss = std::move(trained.loss);
  } else {
    std::vector<std::vector<std::size_t>> rows(groups);
    for (std::size_t i = 0; i < data.size(); ++i) rows[data.group()[i]].push_back(i);
    loss.assign(config.epochs, 0.0);
    for (int a = 0; a < groups; ++a) {
      if (rows[a].empty()) throw std::invalid_argument("empty protected group");
      const FeatureMatrix design = build_design(data, rows[a], st, 0);
      std::vector<int> labels;
      labels.reserve(rows[a].size());
      for (std::size_t i : rows[a]) labels.push_back(data.label()[i]);
      auto trained = train_head(design, labels, config, derive_seed(config.seed, a));
      // Overall loss is the row-weighted mean of the per-group losses.
      const double w = static_cast<double>(rows[a].size()) / static_cast<double>(data.size());
      for (std::size_t e = 0; e < config.epochs; ++e) loss[e] += w * trained.loss[e];
      heads.push_back(std::move(trained.head));
    }
  }

  g_fit_count.fetch_add(1, std::memory_order_relaxed);
  return LogisticModel(config.group_mode, groups, st.mean, st.scale, std::move(heads),
                       std::move(loss));
}

std::uint64_t logistic_fit_count() noexcept { return g_fit_count.load(std::memory_order_relaxed); }

}  // namespace fairbayes
