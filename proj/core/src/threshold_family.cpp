#include "fairbayes/threshold_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fairbayes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign_of(int a) { return a == 1 ? 1.0 : -1.0; }

// Step back from a pole of the OA map by a few ulps of the bracket scale.
double away_from_pole(double limit) {
  return limit - 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(limit));
}

}  // namespace

ThresholdFamily::ThresholdFamily(Kind kind, double cost, std::array<double, 2> p,
                                 std::array<double, 2> p_y)
    : kind_(kind), cost_(cost), p_(p), p_y_(p_y) {
  for (int a = 0; a < 2; ++a) {
    if (!(p_[a] > 0.0 && p_[a] <= 1.0)) throw std::invalid_argument("empty protected group");
    if (!(p_y_[a] >= 0.0 && p_y_[a] <= 1.0)) {
      throw std::invalid_argument("positive rate outside [0, 1]");
    }
  }
  switch (kind_) {
    case Kind::dp: {
      const double m = std::max(p_[0], p_[1]);
      bracket_ = {-m, m};
      break;
    }
    case Kind::cost_sensitive: {
      if (!(cost_ >= 0.0 && cost_ <= 1.0)) throw std::invalid_argument("cost must lie in [0, 1]");
      bracket_ = {std::min(-cost_ * p_[1], (cost_ - 1.0) * p_[0]),
                  std::max((1.0 - cost_) * p_[1], cost_ * p_[0])};
      break;
    }
    case Kind::eo: {
      const double k0 = p_[0] * p_y_[0];
      const double k1 = p_[1] * p_y_[1];
      if (k0 <= 0.0 || k1 <= 0.0) throw std::invalid_argument("empty stratum (no positives in a group)");
      bracket_ = {-k0, k1};
      break;
    }
    case Kind::pe: {
      const double b0 = p_[0] * (1.0 - p_y_[0]);
      const double b1 = p_[1] * (1.0 - p_y_[1]);
      if (b0 <= 0.0 || b1 <= 0.0) throw std::invalid_argument("empty stratum (no negatives in a group)");
      bracket_ = {-b1, b0};
      break;
    }
    case Kind::oa: {
      double limit[2];
      for (int a = 0; a < 2; ++a) {
        const double py = p_y_[a];
        if (py <= 0.0 || py >= 1.0) throw std::invalid_argument("empty stratum (a group has one label)");
        // The map leaves [0, 1] at t = p py (q = 1) or t = p (1 - py) (q = 0),
        // whichever comes first; at py = 1/2 both coincide with the pole 2k.
        limit[a] = std::min(p_[a] * py, p_[a] * (1.0 - py));
        if (py == 0.5) limit[a] = away_from_pole(limit[a]);
      }
      bracket_ = {-limit[0], limit[1]};
      break;
    }
  }
}

ThresholdFamily ThresholdFamily::for_measure(Measure m, std::array<double, 2> p,
                                             std::array<double, 2> p_y) {
  switch (m) {
    case Measure::DP: return ThresholdFamily(Kind::dp, 0.5, p, p_y);
    case Measure::EO: return ThresholdFamily(Kind::eo, 0.5, p, p_y);
    case Measure::PE: return ThresholdFamily(Kind::pe, 0.5, p, p_y);
    case Measure::OA: return ThresholdFamily(Kind::oa, 0.5, p, p_y);
  }
  throw std::invalid_argument("unknown measure");
}

ThresholdFamily ThresholdFamily::cost_sensitive(double c, std::array<double, 2> p,
                                                std::array<double, 2> p_y) {
  return ThresholdFamily(Kind::cost_sensitive, c, p, p_y);
}

Measure ThresholdFamily::measure() const noexcept {
  switch (kind_) {
    case Kind::eo: return Measure::EO;
    case Kind::pe: return Measure::PE;
    case Kind::oa: return Measure::OA;
    default: return Measure::DP;
  }
}

double ThresholdFamily::raw_threshold(int a, double t) const noexcept {
  const double s = sign_of(a);
  const double p = p_[a];
  const double py = p_y_[a];
  switch (kind_) {
    case Kind::dp: return 0.5 + s * t / (2.0 * p);
    case Kind::cost_sensitive: return cost_ + s * t / p;
    case Kind::eo: {
      const double k = p * py;
      return k / (2.0 * k - s * t);
    }
    case Kind::pe: {
      const double b = p * (1.0 - py);
      return (b + s * t) / (2.0 * b + s * t);
    }
    case Kind::oa: {
      const double k = p * py * (1.0 - py);
      return (k - s * py * t) / (2.0 * k - s * t);
    }
  }
  return 0.5;
}

double ThresholdFamily::threshold(int a, double t) const {
  if (a != 0 && a != 1) throw std::invalid_argument("threshold family: binary groups only");
  if (!clamps() && (t < bracket_.lo || t > bracket_.hi)) {
    throw std::domain_error("threshold out of range");
  }
  return std::clamp(raw_threshold(a, t), 0.0, 1.0);
}

double ThresholdFamily::threshold_clamped(int a, double t) const {
  return threshold(a, clamps() ? t : std::clamp(t, bracket_.lo, bracket_.hi));
}

double ThresholdFamily::parameter_at(int a, double q) const {
  const double s = sign_of(a);
  const double p = p_[a];
  const double py = p_y_[a];
  switch (kind_) {
    case Kind::dp: return s * (q - 0.5) * 2.0 * p;
    case Kind::cost_sensitive: return s * (q - cost_) * p;
    case Kind::eo: {
      if (q <= 0.0) return -s * kInf;
      const double k = p * py;
      return s * (2.0 * k - k / q);
    }
    case Kind::pe: {
      if (q >= 1.0) return s * kInf;
      const double b = p * (1.0 - py);
      return s * b * (2.0 * q - 1.0) / (1.0 - q);
    }
    case Kind::oa: {
      if (q == py) return kInf;
      const double k = p * py * (1.0 - py);
      return s * k * (2.0 * q - 1.0) / (q - py);
    }
  }
  return 0.0;
}

}  // namespace fairbayes
