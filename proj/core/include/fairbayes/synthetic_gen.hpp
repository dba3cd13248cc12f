#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fairbayes/core_data.hpp"
#include "fairbayes/gaussian_oracle.hpp"
#include "fairbayes/kv_config.hpp"

namespace fairbayes {

enum class MeanMode {
  uniform_draws,        ///< mu_{ay,j} ~ U(0, 1)
  signed_unit_vectors,  ///< mu_{ay} = (2y - 1) e_a in dimension |A|
};

enum class PositiveRateMode {
  fixed,          ///< use SynthSpec::positive_rates
  uniform_draws,  ///< p_Ya ~ U(0, 1) per population seed
};

struct SynthSpec {
  std::size_t dimension = 10;
  double sigma = 1.0;
  std::vector<double> group_probs{0.3, 0.7};
  std::vector<double> positive_rates{0.4, 0.7};
  PositiveRateMode rate_mode = PositiveRateMode::fixed;
  MeanMode mean_mode = MeanMode::uniform_draws;
  std::uint64_t seed = 0;

  /// Binary benchmark: d = 10, sigma = 1, p_1 = 0.7, p_Y1 = 0.7, p_Y0 = 0.4.
  static SynthSpec binary_default(std::uint64_t seed = 0);
  /// Multi-group benchmark: d = |A|, sigma = 2, p_a proportional to sqrt(a)
  /// for a = 1..|A|, p_Ya ~ U(0, 1), mu_ay = (2y - 1) e_a.
  static SynthSpec multiclass_default(int groups, std::uint64_t seed = 0);

  int group_count() const noexcept { return static_cast<int>(group_probs.size()); }
  void validate() const;

  KeyValueDoc to_doc() const;
  /// Reads the `synth.*` keys of a document; absent keys keep the values of `base`.
  static SynthSpec from_doc(const KeyValueDoc& doc, const SynthSpec& base);
};

/// Deterministic in spec (including spec.seed).
GaussianPopulation draw_population(const SynthSpec& spec);

/// n rows with A ~ p, Y | A ~ Bernoulli(p_Ya), X | A, Y ~ N(mu_ay, sigma^2 I).
Dataset sample(const GaussianPopulation& pop, std::size_t n, std::uint64_t seed);

/// Writes `data` as CSV with header x0..x{d-1},group,label; numbers use the
/// shortest round-trip representation.
void write_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace fairbayes
