#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace arx {

/// Deterministic random stream: std::mt19937_64 (output fully specified by
/// the standard) with in-house uniform and Gaussian transforms, so a seed
/// reproduces the same draws on every platform and standard library.
///
/// uniform(): top 53 bits of one engine output, in [0, 1).
/// gaussian(): Marsaglia polar method, caching the second variate.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  /// Number of raw 64-bit engine outputs consumed so far.
  std::uint64_t position() const { return position_; }

  std::uint64_t next_u64() {
    ++position_;
    return engine_();
  }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double gaussian();
  /// +1 or -1 with equal probability.
  double sign() { return (next_u64() >> 63) != 0 ? 1.0 : -1.0; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

/// Seed for replicate r: mix64(base + (r + 1) * golden). Injective in r for a
/// fixed base because the affine map is injective mod 2^64 and mix64 is a
/// bijection.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t replicate);

enum class NoiseFamily { kGaussian, kUniform, kRademacherMixture };

std::string to_string(NoiseFamily family);
NoiseFamily parse_noise_family(const std::string& name);

/// I.i.d. zero-mean noise with variance sigma2.
///
/// kRademacherMixture draws eps = +-alpha with probability 1 - w and
/// +-ratio * alpha with probability w, where alpha is solved from
/// alpha^2 (1 - w + w ratio^2) = sigma2.
class NoiseModel {
 public:
  static NoiseModel gaussian(double sigma2);
  static NoiseModel uniform(double sigma2);
  static NoiseModel rademacher_mixture(double sigma2, double weight = 0.2, double ratio = 3.0);

  NoiseFamily family() const { return family_; }
  double sigma2() const { return sigma2_; }
  double mixture_weight() const { return weight_; }
  double mixture_ratio() const { return ratio_; }
  /// Supremum a of orders with finite conditional moments. All built-in
  /// families have every moment finite.
  double moment_order_bound() const;

  /// Half-width of the support for kUniform, inner atom alpha for the mixture.
  double base_scale() const;

  double sample(RngStream& rng) const;

  /// E[eps^{2s}] in closed form. Throws std::domain_error for s < 1 or a
  /// moment beyond moment_order_bound or outside double range.
  double even_moment(int s) const;

 private:
  NoiseModel(NoiseFamily family, double sigma2, double weight, double ratio);

  NoiseFamily family_;
  double sigma2_;
  double weight_;
  double ratio_;
};

}  // namespace arx
