#pragma once

// Counter-based random streams and an order-independent parallel loop.
//
// Every random quantity in the library is drawn from a stream keyed by
// (seed, label, index). Stream i never depends on how many other streams
// were consumed before it, so results are identical for any worker count.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <cstdlib>
#include <limits>
#include <random>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>

namespace hardbody {

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t splitmix_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64 output function applied to a counter. Output k of the stream
/// keyed by (seed, label, index) is mix(key + (k + 1) * golden), so any element
/// can be computed without touching the others.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  CounterRng(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) noexcept
      : key_(splitmix_mix(splitmix_mix(seed ^ fnv1a(label)) + splitmix_mix(index + kGolden))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return splitmix_mix(key_ + counter_ * kGolden);
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline double uniform01(CounterRng& rng) {
  // 53 random bits, never exactly 1.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Ziggurat sampler; about twice as fast as std::normal_distribution here.
inline Eigen::VectorXd gaussian_vector(CounterRng& rng, Eigen::Index n) {
  boost::random::normal_distribution<double> normal;
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = normal(rng);
  return g;
}

inline Eigen::VectorXd uniform_on_sphere(CounterRng& rng, Eigen::Index n) {
  Eigen::VectorXd g = gaussian_vector(rng, n);
  double r = g.norm();
  while (r == 0.0) {
    g = gaussian_vector(rng, n);
    r = g.norm();
  }
  return g / r;
}

/// Uniform point in the radius-r ball: Gaussian direction, radius r*U^(1/n).
inline Eigen::VectorXd uniform_in_ball(CounterRng& rng, Eigen::Index n, double r = 1.0) {
  Eigen::VectorXd u = uniform_on_sphere(rng, n);
  return u * (r * std::pow(uniform01(rng), 1.0 / static_cast<double>(n)));
}

/// Worker cap: HARDBODY_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("HARDBODY_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1u : hc;
}

/// Runs fn(i) for i in [0, count). Each index must write only its own slot;
/// scheduling never affects results.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned workers = worker_count()) {
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  // A worker stops at its first failure; the failure with the lowest index
  // is rethrown so the reported error does not depend on scheduling.
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> error_index(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
          error_index[w] = i;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  auto it = std::min_element(error_index.begin(), error_index.end());
  if (*it < count) std::rethrow_exception(errors[static_cast<std::size_t>(it - error_index.begin())]);
}

/// Pairwise summation: the result depends only on the values and their order.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace hardbody
