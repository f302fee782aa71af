#include "arx/noise.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "arx/errors.hpp"

namespace arx {

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t replicate) {
  return mix64(base_seed + (replicate + 1) * 0x9e3779b97f4a7c15ULL);
}

std::string to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kGaussian: return "gaussian";
    case NoiseFamily::kUniform: return "uniform";
    case NoiseFamily::kRademacherMixture: return "scaled-rademacher-mixture";
  }
  return "unknown";
}

NoiseFamily parse_noise_family(const std::string& name) {
  if (name == "gaussian") return NoiseFamily::kGaussian;
  if (name == "uniform") return NoiseFamily::kUniform;
  if (name == "scaled-rademacher-mixture") return NoiseFamily::kRademacherMixture;
  throw ValidationError("unknown noise family '" + name + "'");
}

NoiseModel::NoiseModel(NoiseFamily family, double sigma2, double weight, double ratio)
    : family_(family), sigma2_(sigma2), weight_(weight), ratio_(ratio) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw ValidationError("noise variance sigma2 must be positive and finite");
}

NoiseModel NoiseModel::gaussian(double sigma2) {
  return {NoiseFamily::kGaussian, sigma2, 0.0, 1.0};
}

NoiseModel NoiseModel::uniform(double sigma2) {
  return {NoiseFamily::kUniform, sigma2, 0.0, 1.0};
}

NoiseModel NoiseModel::rademacher_mixture(double sigma2, double weight, double ratio) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw ValidationError("mixture weight must lie in [0, 1]");
  if (!(ratio > 0.0)) throw ValidationError("mixture ratio must be positive");
  return {NoiseFamily::kRademacherMixture, sigma2, weight, ratio};
}

double NoiseModel::moment_order_bound() const { return std::numeric_limits<double>::infinity(); }

double NoiseModel::base_scale() const {
  switch (family_) {
    case NoiseFamily::kGaussian: return std::sqrt(sigma2_);
    case NoiseFamily::kUniform: return std::sqrt(3.0 * sigma2_);
    case NoiseFamily::kRademacherMixture:
      return std::sqrt(sigma2_ / (1.0 - weight_ + weight_ * ratio_ * ratio_));
  }
  return 0.0;
}

double NoiseModel::sample(RngStream& rng) const {
  switch (family_) {
    case NoiseFamily::kGaussian: return std::sqrt(sigma2_) * rng.gaussian();
    case NoiseFamily::kUniform: {
      const double c = base_scale();
      return rng.uniform(-c, c);
    }
    case NoiseFamily::kRademacherMixture: {
      const double alpha = base_scale();
      const double scale = rng.uniform() < weight_ ? ratio_ * alpha : alpha;
      return scale * rng.sign();
    }
  }
  return 0.0;
}

double NoiseModel::even_moment(int s) const {
  if (s < 1) throw std::domain_error("even_moment requires s >= 1");
  if (!(2.0 * s < moment_order_bound()))
    throw std::domain_error("moment order exceeds the family's moment bound");
  double value = 0.0;
  switch (family_) {
    case NoiseFamily::kGaussian: {
      double dfact = 1.0;
      for (int k = 2 * s - 1; k > 1; k -= 2) dfact *= k;
      value = dfact * std::pow(sigma2_, s);
      break;
    }
    case NoiseFamily::kUniform:
      value = std::pow(base_scale(), 2 * s) / (2 * s + 1);
      break;
    case NoiseFamily::kRademacherMixture:
      value = std::pow(base_scale(), 2 * s) *
              ((1.0 - weight_) + weight_ * std::pow(ratio_, 2 * s));
      break;
  }
  if (!std::isfinite(value)) throw std::domain_error("even moment not representable as double");
  return value;
}

}  // namespace arx
