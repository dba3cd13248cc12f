#include "fairbayes/synthetic_gen.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fairbayes/random.hpp"

namespace fairbayes {

namespace {

// Stream numbers for derive_seed.
constexpr std::uint64_t kRateStream = 1;
constexpr std::uint64_t kMeanStream = 2;

std::string_view mean_mode_name(MeanMode m) {
  return m == MeanMode::uniform_draws ? "uniform" : "signed_unit";
}

std::string_view rate_mode_name(PositiveRateMode m) {
  return m == PositiveRateMode::fixed ? "fixed" : "uniform";
}

}  // namespace

SynthSpec SynthSpec::binary_default(std::uint64_t seed) {
  SynthSpec s;
  s.seed = seed;
  return s;
}

SynthSpec SynthSpec::multiclass_default(int groups, std::uint64_t seed) {
  if (groups < 2) throw std::invalid_argument("multiclass spec needs at least two groups");
  SynthSpec s;
  s.dimension = static_cast<std::size_t>(groups);
  s.sigma = 2.0;
  s.group_probs.clear();
  double total = 0.0;
  for (int a = 1; a <= groups; ++a) total += std::sqrt(static_cast<double>(a));
  for (int a = 1; a <= groups; ++a) s.group_probs.push_back(std::sqrt(static_cast<double>(a)) / total);
  s.positive_rates.assign(static_cast<std::size_t>(groups), 0.5);
  s.rate_mode = PositiveRateMode::uniform_draws;
  s.mean_mode = MeanMode::signed_unit_vectors;
  s.seed = seed;
  return s;
}

void SynthSpec::validate() const {
  if (dimension == 0) throw std::invalid_argument("synth: dimension must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("synth: sigma must be positive");
  if (group_probs.empty()) throw std::invalid_argument("synth: no groups");
  double sum = 0.0;
  for (double p : group_probs) {
    if (!(p > 0.0)) throw std::invalid_argument("synth: group probabilities must be positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("synth: group probabilities must sum to 1");
  if (rate_mode == PositiveRateMode::fixed) {
    if (positive_rates.size() != group_probs.size()) {
      throw std::invalid_argument("synth: one positive rate per group expected");
    }
    for (double p : positive_rates) {
      if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("synth: positive rates must lie in (0, 1)");
    }
  }
  if (mean_mode == MeanMode::signed_unit_vectors && dimension < group_probs.size()) {
    throw std::invalid_argument("synth: signed unit means need dimension >= group count");
  }
}

KeyValueDoc SynthSpec::to_doc() const {
  KeyValueDoc doc;
  doc.add("synth.dimension", std::to_string(dimension));
  doc.add("synth.sigma", format_double(sigma));
  doc.add("synth.group_probs", format_doubles(group_probs));
  doc.add("synth.positive_rates", format_doubles(positive_rates));
  doc.add("synth.rate_mode", std::string(rate_mode_name(rate_mode)));
  doc.add("synth.mean_mode", std::string(mean_mode_name(mean_mode)));
  doc.add("synth.seed", std::to_string(seed));
  return doc;
}

SynthSpec SynthSpec::from_doc(const KeyValueDoc& doc, const SynthSpec& base) {
  SynthSpec s = base;
  if (auto v = doc.get("synth.dimension")) s.dimension = static_cast<std::size_t>(parse_int(*v));
  if (auto v = doc.get("synth.sigma")) s.sigma = parse_double(*v);
  if (auto v = doc.get("synth.group_probs")) s.group_probs = parse_doubles(*v);
  if (auto v = doc.get("synth.positive_rates")) s.positive_rates = parse_doubles(*v);
  if (auto v = doc.get("synth.rate_mode")) {
    if (*v == "fixed") {
      s.rate_mode = PositiveRateMode::fixed;
    } else if (*v == "uniform") {
      s.rate_mode = PositiveRateMode::uniform_draws;
    } else {
      throw std::runtime_error("synth.rate_mode must be fixed or uniform");
    }
  }
  if (auto v = doc.get("synth.mean_mode")) {
    if (*v == "uniform") {
      s.mean_mode = MeanMode::uniform_draws;
    } else if (*v == "signed_unit") {
      s.mean_mode = MeanMode::signed_unit_vectors;
    } else {
      throw std::runtime_error("synth.mean_mode must be uniform or signed_unit");
    }
  }
  if (auto v = doc.get("synth.seed")) s.seed = static_cast<std::uint64_t>(std::stoull(*v));
  s.validate();
  return s;
}

GaussianPopulation draw_population(const SynthSpec& spec) {
  spec.validate();
  const int groups = spec.group_count();
  GaussianPopulation pop;
  pop.p = spec.group_probs;
  pop.sigma = spec.sigma;
  if (spec.rate_mode == PositiveRateMode::fixed) {
    pop.p_y = spec.positive_rates;
  } else {
    Rng rng(derive_seed(spec.seed, kRateStream));
    for (int a = 0; a < groups; ++a) {
      double u = 0.0;
      while (u == 0.0) u = rng.uniform();
      pop.p_y.push_back(u);
    }
  }
  pop.mu.resize(static_cast<std::size_t>(groups));
  Rng rng(derive_seed(spec.seed, kMeanStream));
  for (int a = 0; a < groups; ++a) {
    for (int y = 0; y < 2; ++y) {
      auto& m = pop.mu[a][y];
      m.assign(spec.dimension, 0.0);
      if (spec.mean_mode == MeanMode::uniform_draws) {
        for (double& v : m) v = rng.uniform();
      } else {
        m[a] = 2.0 * y - 1.0;
      }
    }
  }
  pop.validate();
  return pop;
}

Dataset sample(const GaussianPopulation& pop, std::size_t n, std::uint64_t seed) {
  pop.validate();
  if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
  Rng rng(seed);
  const std::size_t d = pop.dimension();
  FeatureMatrix x(n, d);
  std::vector<int> group(n), label(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int a = rng.categorical(pop.p);
    const int y = rng.bernoulli(pop.p_y[a]) ? 1 : 0;
    group[i] = a;
    label[i] = y;
    auto row = x.row(i);
    for (std::size_t j = 0; j < d; ++j) row[j] = rng.normal(pop.mu[a][y][j], pop.sigma);
  }
  return Dataset(std::move(x), std::move(group), std::move(label), pop.group_count());
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t j = 0; j < data.dimension(); ++j) out << 'x' << j << ',';
  out << "group,label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features().row(i)) out << format_double(v) << ',';
    out << data.group()[i] << ',' << data.label()[i] << '\n';
  }
  if (!out) throw std::runtime_error("error writing " + path.string());
}

}  // namespace fairbayes
