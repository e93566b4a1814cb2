#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hardbody/rng.hpp"

namespace hardbody {

/// A Monte-Carlo value with its standard error and the stream it came from.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::string label;

  /// |value - reference| <= k * std_error (with a floor for zero-variance runs).
  bool within(double reference, double k = 3.0, double floor = 1e-12) const {
    return std::abs(value - reference) <= k * std_error + floor;
  }
};

inline void to_json(nlohmann::json& j, const Estimate& e) {
  j = nlohmann::json{{"value", e.value},
                     {"stderr", e.std_error},
                     {"n_samples", e.n_samples},
                     {"seed", e.seed},
                     {"label", e.label}};
}

inline void from_json(const nlohmann::json& j, Estimate& e) {
  j.at("value").get_to(e.value);
  j.at("stderr").get_to(e.std_error);
  j.at("n_samples").get_to(e.n_samples);
  j.at("seed").get_to(e.seed);
  j.at("label").get_to(e.label);
}

/// Sample mean with the usual standard error; summation is pairwise so the
/// result only depends on the sample order.
inline Estimate mean_estimate(std::span<const double> samples, std::uint64_t seed, std::string label) {
  Estimate e;
  e.seed = seed;
  e.label = std::move(label);
  e.n_samples = static_cast<std::int64_t>(samples.size());
  if (samples.empty()) return e;
  const double n = static_cast<double>(samples.size());
  e.value = pairwise_sum(samples) / n;
  if (samples.size() > 1) {
    std::vector<double> sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      double d = samples[i] - e.value;
      sq[i] = d * d;
    }
    e.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return e;
}

/// Binomial proportion estimate.
inline Estimate proportion_estimate(std::int64_t hits, std::int64_t trials, std::uint64_t seed, std::string label) {
  Estimate e;
  e.seed = seed;
  e.label = std::move(label);
  e.n_samples = trials;
  if (trials <= 0) return e;
  double p = static_cast<double>(hits) / static_cast<double>(trials);
  e.value = p;
  e.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return e;
}

}  // namespace hardbody
