#include "uqbench/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "uqbench/metrics.hpp"
#include "uqbench/random.hpp"

namespace uqbench::synth {

namespace {

constexpr double kLatentEps = 1e-12;

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Beta(a, b) from two gamma variates on an engine keyed by the cell.
double SampleBeta(const SynthConfig& config, std::size_t n, std::size_t c) {
  std::mt19937_64 engine(random::Hash(config.seed, random::kSynthLatent, n, c));
  std::gamma_distribution<double> ga(config.aleatoric_a, 1.0);
  std::gamma_distribution<double> gb(config.aleatoric_b, 1.0);
  const double x = ga(engine);
  const double y = gb(engine);
  const double p = (x + y) > 0.0 ? x / (x + y) : 0.5;
  return std::clamp(p, kLatentEps, 1.0 - kLatentEps);
}

void RequireRate(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string("SynthConfig: ") + name + " must lie in [0,1]");
  }
}

}  // namespace

void Validate(const SynthConfig& config) {
  if (config.samples == 0 || config.classes == 0 || config.members == 0) {
    throw std::invalid_argument("SynthConfig: samples, classes and members must be >= 1");
  }
  if (!(config.aleatoric_a > 0.0) || !(config.aleatoric_b > 0.0) ||
      !std::isfinite(config.aleatoric_a) || !std::isfinite(config.aleatoric_b)) {
    throw std::invalid_argument("SynthConfig: Beta parameters must be finite and > 0");
  }
  if (!(config.epistemic_std >= 0.0) || !std::isfinite(config.epistemic_std)) {
    throw std::invalid_argument("SynthConfig: epistemic_std must be finite and >= 0");
  }
  if (!(config.ood_multiplier >= 0.0) || !std::isfinite(config.ood_multiplier)) {
    throw std::invalid_argument("SynthConfig: ood_multiplier must be finite and >= 0");
  }
  RequireRate(config.ood_fraction, "ood_fraction");
  RequireRate(config.label_uncertain_rate, "label_uncertain_rate");
  RequireRate(config.coupling, "coupling");
}

SynthData Generate(const SynthConfig& config) {
  Validate(config);
  const std::size_t n_samples = config.samples;
  const std::size_t n_classes = config.classes;
  const std::size_t n_members = config.members;

  GroundTruth truth{std::vector<double>(n_samples), std::vector<double>(n_samples),
                    Matrix(n_samples, n_classes)};
  std::vector<std::int8_t> ood(n_samples, 0);
  std::vector<std::int8_t> labels(n_samples * n_classes, 0);
  std::vector<double> members(n_members * n_samples * n_classes);
  std::vector<double> cell_entropy(n_samples * n_classes);

  for (std::size_t n = 0; n < n_samples; ++n) {
    const bool is_ood = random::Uniform(config.seed, random::kSynthOod, n) < config.ood_fraction;
    ood[n] = is_ood ? 1 : 0;
    const double driver = random::Uniform(config.seed, random::kSynthCoupling, n);
    const double noise = config.epistemic_std * (is_ood ? config.ood_multiplier : 1.0) *
                         (1.0 + kCouplingGain * config.coupling * driver);
    const double shrink = 1.0 - config.coupling * driver;
    truth.epistemic[n] = noise;

    double entropy_sum = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double p0 = SampleBeta(config, n, c);
      const double logit = std::log(p0) - std::log1p(-p0);
      const double centre = logit * shrink;
      const double p = Sigmoid(centre);
      truth.latent(n, c) = p;
      const double h = decomposition::BinaryEntropy(p);
      cell_entropy[n * n_classes + c] = h;
      entropy_sum += h;

      labels[n * n_classes + c] =
          random::Uniform(config.seed, random::kSynthLabel, n, c) < p ? 1 : 0;
      for (std::size_t m = 0; m < n_members; ++m) {
        const double eps =
            noise == 0.0 ? 0.0 : random::StandardNormal(config.seed, random::kSynthMember, n, c, m);
        members[(m * n_samples + n) * n_classes + c] = Sigmoid(centre + noise * eps);
      }
    }
    truth.aleatoric[n] = entropy_sum / static_cast<double>(n_classes);
  }

  const auto uncertain = static_cast<std::size_t>(
      std::llround(config.label_uncertain_rate * static_cast<double>(cell_entropy.size())));
  if (uncertain > 0) {
    std::vector<std::size_t> order(cell_entropy.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return cell_entropy[a] > cell_entropy[b];
    });
    for (std::size_t i = 0; i < uncertain; ++i) labels[order[i]] = LabelTensor::kUncertain;
  }

  return {PredictionTensor(n_members, n_samples, n_classes, std::move(members)),
          LabelTensor(n_samples, n_classes, std::move(labels)), std::move(ood), std::move(truth)};
}

SynthConfig PlantedOodRegime(std::uint64_t seed) {
  SynthConfig config;
  config.samples = 2000;
  config.classes = 14;
  config.members = 5;
  config.aleatoric_a = 2.0;
  config.aleatoric_b = 2.0;
  config.epistemic_std = 0.3;
  config.ood_fraction = 0.5;
  config.ood_multiplier = 5.0;
  config.seed = seed;
  return config;
}

SynthConfig IndependentRegime(std::uint64_t seed) {
  SynthConfig config;
  config.samples = 10000;
  config.classes = 14;
  config.members = 5;
  config.aleatoric_a = 0.5;
  config.aleatoric_b = 0.5;
  config.epistemic_std = 0.3;
  config.ood_fraction = 0.5;
  config.ood_multiplier = 5.0;
  config.seed = seed;
  return config;
}

SynthConfig CoupledRegime(std::uint64_t seed) {
  SynthConfig config = IndependentRegime(seed);
  config.ood_fraction = 0.0;
  config.coupling = 1.0;
  return config;
}

FactorRecovery FactorRecoveryReport(const PredictionTensor& preds, const GroundTruth& truth,
                                    decomposition::Aggregation aggregation) {
  if (truth.aleatoric.size() != preds.samples() || truth.epistemic.size() != preds.samples()) {
    throw std::invalid_argument("FactorRecoveryReport: ground truth size differs from tensor");
  }
  if (preds.samples() < 2) {
    throw std::invalid_argument("FactorRecoveryReport: need at least two samples");
  }
  const decomposition::Decomposition d = decomposition::Decompose(preds);
  const std::vector<double> au = decomposition::AggregateClasses(d.au, aggregation).per_sample();
  const std::vector<double> eu = decomposition::AggregateClasses(d.eu, aggregation).per_sample();

  FactorRecovery out;
  out.eu_recoverable = preds.members() >= 2;
  out.au_vs_aleatoric = metrics::Spearman(au, truth.aleatoric);
  out.au_vs_epistemic = metrics::Spearman(au, truth.epistemic);
  if (out.eu_recoverable) {
    out.eu_vs_epistemic = metrics::Spearman(eu, truth.epistemic);
    out.eu_vs_aleatoric = metrics::Spearman(eu, truth.aleatoric);
  }
  return out;
}

}  // namespace uqbench::synth
