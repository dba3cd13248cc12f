#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fairbayes {

/// One splitmix64 step: the output for state x (x plus the golden gamma, mixed).
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of an independent stream derived from a master seed.
///
/// derive_seed(m, s) = splitmix64(splitmix64(m) ^ splitmix64(s + 0x9e3779b97f4a7c15)).
/// Experiment runners number their tasks (repetition, purpose) and derive
/// one seed per task so results do not depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t sub) noexcept;

/// Seedable generator with a platform-independent stream.
///
/// Engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Distributions are implemented here rather than taken from
/// <random>, whose distribution algorithms are implementation-defined:
/// uniforms use the top 53 bits, normals use the Marsaglia polar method,
/// integer draws use rejection on a power-of-two mask.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  /// Draw from a discrete distribution given by nonnegative weights summing to 1.
  int categorical(std::span<const double> probs);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fairbayes
