#pragma once

// Monte-Carlo estimators over body oracles. Every estimator draws sample i
// from the stream (seed, label, i) with a fixed label per quantity, so two
// bodies estimated with the same seed see the same random numbers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hardbody/design.hpp"
#include "hardbody/error.hpp"
#include "hardbody/estimate.hpp"
#include "hardbody/rng.hpp"
#include "hardbody/solver.hpp"

namespace hardbody {

/// E|G| for a standard Gaussian in R^n.
inline double ball_mean_width(int n) {
  const double h = 0.5 * static_cast<double>(n);
  return std::sqrt(2.0) * std::exp(std::lgamma(h + 0.5) - std::lgamma(h));
}

/// Volume of the radius-r ball in R^n.
inline double ball_volume(int n, double r = 1.0) {
  const double h = 0.5 * static_cast<double>(n);
  return std::exp(h * std::log(std::numbers::pi) - std::lgamma(h + 1.0) + n * std::log(r));
}

// --- Gaussian mean width ------------------------------------------------------

struct WidthSamples {
  std::vector<double> support;  // h_L(G_i)
  std::vector<double> norm;     // |G_i|, i.e. h_B(G_i) on the same draws
  bool upper_bound_only = false;
};

inline constexpr const char* kWidthLabel = "gaussian_width";

inline WidthSamples mean_width_samples(const BodyOracle& oracle, std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw Error(ErrorCode::InvalidConfig, "n_samples must be >= 1");
  if (!oracle.support) throw Error(ErrorCode::InvalidConfig, "oracle has no support function");
  const auto count = static_cast<std::size_t>(n_samples);
  WidthSamples out;
  out.support.resize(count);
  out.norm.resize(count);
  std::vector<char> flagged(count, 0);
  parallel_for(count, [&](std::size_t i) {
    CounterRng rng(seed, kWidthLabel, i);
    Eigen::VectorXd g = gaussian_vector(rng, oracle.dimension);
    auto s = oracle.support(g);
    out.support[i] = s.value;
    out.norm[i] = g.norm();
    flagged[i] = s.upper_bound_only ? 1 : 0;
  });
  out.upper_bound_only = std::any_of(flagged.begin(), flagged.end(), [](char c) { return c != 0; });
  return out;
}

struct WidthEstimate : Estimate {
  // Some support values were certified upper bounds rather than exact.
  bool upper_bound_only = false;
};

inline WidthEstimate mean_width(const BodyOracle& oracle, std::int64_t n_samples, std::uint64_t seed) {
  auto s = mean_width_samples(oracle, n_samples, seed);
  WidthEstimate e;
  static_cast<Estimate&>(e) = mean_estimate(s.support, seed, "mean_width");
  e.upper_bound_only = s.upper_bound_only;
  return e;
}

/// (w(L)/w(B))^n with both widths from the same Gaussian draws; the standard
/// error comes from the delta method on the ratio of means.
inline WidthEstimate urysohn_bound(const BodyOracle& oracle, std::int64_t n_samples, std::uint64_t seed) {
  auto s = mean_width_samples(oracle, n_samples, seed);
  const double nn = static_cast<double>(s.support.size());
  const double mf = pairwise_sum(s.support) / nn;
  const double mg = pairwise_sum(s.norm) / nn;
  const double r = mf / mg;
  double se_r = 0.0;
  if (s.support.size() > 1) {
    std::vector<double> dev(s.support.size());
    for (std::size_t i = 0; i < dev.size(); ++i) {
      double d = (s.support[i] - mf) - r * (s.norm[i] - mg);
      dev[i] = d * d;
    }
    se_r = std::sqrt(pairwise_sum(dev) / (nn - 1.0) / nn) / mg;
  }
  const double n = static_cast<double>(oracle.dimension);
  WidthEstimate e;
  e.value = std::pow(r, n);
  e.std_error = n * std::pow(r, n - 1.0) * se_r;
  e.n_samples = static_cast<std::int64_t>(s.support.size());
  e.seed = seed;
  e.label = "urysohn_bound";
  e.upper_bound_only = s.upper_bound_only;
  return e;
}

// --- |Q_t°| / |B| ---------------------------------------------------------------

/// Indicator per draw: Y_i uniform in B satisfies max_i |<x_i, Y>| <= t.
inline std::vector<char> qt_polar_hits(const QuasiOrthogonalSystem& sys, double t, std::int64_t n_samples,
                                       std::uint64_t seed) {
  if (!(t > 0.0)) throw Error(ErrorCode::NonPositiveT, "t must be positive");
  if (n_samples < 1) throw Error(ErrorCode::InvalidConfig, "n_samples must be >= 1");
  std::vector<char> hits(static_cast<std::size_t>(n_samples));
  parallel_for(hits.size(), [&](std::size_t i) {
    CounterRng rng(seed, "unit_ball", i);
    Eigen::VectorXd y = uniform_in_ball(rng, sys.n);
    hits[i] = sys.max_abs_projection(y) <= t ? 1 : 0;
  });
  return hits;
}

inline Estimate volume_ratio_qt_polar(const QuasiOrthogonalSystem& sys, double t, std::int64_t n_samples,
                                      std::uint64_t seed) {
  auto hits = qt_polar_hits(sys, t, n_samples, seed);
  std::int64_t k = std::count(hits.begin(), hits.end(), char{1});
  return proportion_estimate(k, n_samples, seed, "volume_ratio_qt_polar");
}

// --- hit-and-run --------------------------------------------------------------

struct ChainConfig {
  std::optional<int> burn_in;   // default 10 n^2
  std::optional<int> thinning;  // default n
  std::optional<Eigen::VectorXd> start;  // default origin
};

struct ChainResult {
  std::vector<Eigen::VectorXd> points;
  // Smallest per-coordinate effective sample size of the thinned output.
  double effective_sample_size = 0.0;
};

/// Effective sample size of a scalar series from Geyer's initial positive
/// sequence of paired autocorrelations.
inline double effective_sample_size(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  const double mean = pairwise_sum(x) / static_cast<double>(n);
  auto acov = [&](std::size_t lag) {
    std::vector<double> prod(n - lag);
    for (std::size_t i = 0; i + lag < n; ++i) prod[i] = (x[i] - mean) * (x[i + lag] - mean);
    return pairwise_sum(prod) / static_cast<double>(n);
  };
  const double c0 = acov(0);
  if (!(c0 > 0.0)) return static_cast<double>(n);
  double tau = -1.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double pair = (acov(2 * k) + acov(2 * k + 1)) / c0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / static_cast<double>(n));
  return std::min(static_cast<double>(n), static_cast<double>(n) / tau);
}

namespace detail {

/// sup{t >= 0 : x + t u in body} by bracketing and bisection on membership.
inline double ray_exit_bisect(const BodyOracle& body, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  auto inside = [&](double t) { return body.membership(x + t * u, 0.0) != Membership::Outside; };
  const double unorm = u.norm();
  double hi;
  if (std::isfinite(body.bound_radius)) {
    hi = (body.bound_radius + x.norm()) / unorm * (1.0 + 1e-12);
  } else {
    hi = 1.0;
    int k = 0;
    while (inside(hi)) {
      hi *= 2.0;
      if (++k > 60) throw Error(ErrorCode::DomainError, "body is unbounded along the chord");
    }
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// The direct chord program can stall near the boundary; bisection on
/// membership is slower but only needs gauge solves.
inline double ray_exit(const BodyOracle& body, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  if (!body.ray_exit) return ray_exit_bisect(body, x, u);
  try {
    return body.ray_exit(x, u);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IterationLimit) throw;
  }
  return ray_exit_bisect(body, x, u);
}

inline ChainResult run_chain(const BodyOracle& body, const ChainConfig& cfg, int n_points, std::uint64_t seed,
                             std::uint64_t chain_index) {
  const int n = body.dimension;
  const int burn_in = cfg.burn_in.value_or(10 * n * n);
  const int thinning = cfg.thinning.value_or(n);
  if (burn_in < 1 || thinning < 1) throw Error(ErrorCode::InvalidConfig, "burn_in and thinning must be >= 1");
  if (n_points < 1) throw Error(ErrorCode::InvalidConfig, "n_points must be >= 1");
  Eigen::VectorXd x = cfg.start.value_or(Eigen::VectorXd::Zero(n));
  if (x.size() != n) throw Error(ErrorCode::InvalidConfig, "start point has the wrong dimension");
  if (body.membership(x, 1e-9) != Membership::Inside)
    throw Error(ErrorCode::StartNotInterior, "hit-and-run start point is not interior");

  CounterRng rng(seed, "hit_and_run", chain_index);
  ChainResult out;
  out.points.reserve(static_cast<std::size_t>(n_points));
  const long total = static_cast<long>(burn_in) + static_cast<long>(thinning) * n_points;
  for (long step = 1; step <= total; ++step) {
    Eigen::VectorXd u = uniform_on_sphere(rng, n);
    double forward = ray_exit(body, x, u);
    double backward = ray_exit(body, x, -u);
    if (!(forward + backward >= 1e-12))
      throw Error(ErrorCode::ChordDegenerate, "chord length below 1e-12 at step " + std::to_string(step));
    x += (-backward + (forward + backward) * uniform01(rng)) * u;
    if (step > burn_in && (step - burn_in) % thinning == 0) out.points.push_back(x);
  }
  double ess = static_cast<double>(out.points.size());
  std::vector<double> coord(out.points.size());
  for (int k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < coord.size(); ++i) coord[i] = out.points[i][k];
    ess = std::min(ess, effective_sample_size(coord));
  }
  out.effective_sample_size = ess;
  return out;
}

}  // namespace detail

/// Approximately uniform points: each step moves to a uniform point of the
/// chord through the current point in a uniform direction.
inline ChainResult hit_and_run(const BodyOracle& body, const ChainConfig& cfg, int n_points, std::uint64_t seed) {
  return detail::run_chain(body, cfg, n_points, seed, 0);
}

/// Independent chains (stream index = chain number) run concurrently.
inline std::vector<ChainResult> hit_and_run_chains(const BodyOracle& body, const ChainConfig& cfg, int n_chains,
                                                   int points_per_chain, std::uint64_t seed) {
  if (n_chains < 1) throw Error(ErrorCode::InvalidConfig, "n_chains must be >= 1");
  std::vector<ChainResult> out(static_cast<std::size_t>(n_chains));
  parallel_for(out.size(), [&](std::size_t c) { out[c] = detail::run_chain(body, cfg, points_per_chain, seed, c); });
  return out;
}

// --- volume by hit ratio ----------------------------------------------------------

/// A body with closed-form volume that can be sampled exactly. The cylinder
/// axis is coordinate 0: |y0| <= half_height, |y_rest| <= radius.
struct ReferenceBody {
  enum class Shape { Ball, Cube, Cylinder };
  Shape shape = Shape::Ball;
  int dimension = 1;
  double radius = 1.0;  // ball radius, cube half-width, cylinder radius
  double half_height = 1.0;

  static ReferenceBody ball(int n, double r = 1.0) { return {Shape::Ball, n, r, 0.0}; }
  static ReferenceBody cube(int n, double half_width = 1.0) { return {Shape::Cube, n, half_width, 0.0}; }
  static ReferenceBody cylinder(int n, double r, double half_height) { return {Shape::Cylinder, n, r, half_height}; }

  double volume() const {
    switch (shape) {
      case Shape::Ball: return ball_volume(dimension, radius);
      case Shape::Cube: return std::pow(2.0 * radius, dimension);
      case Shape::Cylinder: return 2.0 * half_height * ball_volume(dimension - 1, radius);
    }
    return 0.0;
  }

  double gauge(const Eigen::VectorXd& y) const {
    switch (shape) {
      case Shape::Ball: return y.norm() / radius;
      case Shape::Cube: return y.lpNorm<Eigen::Infinity>() / radius;
      case Shape::Cylinder:
        return std::max(std::abs(y[0]) / half_height, y.tail(dimension - 1).norm() / radius);
    }
    return 0.0;
  }

  Eigen::VectorXd sample(CounterRng& rng) const {
    switch (shape) {
      case Shape::Ball: return uniform_in_ball(rng, dimension, radius);
      case Shape::Cube: {
        Eigen::VectorXd y(dimension);
        for (int k = 0; k < dimension; ++k) y[k] = radius * (2.0 * uniform01(rng) - 1.0);
        return y;
      }
      case Shape::Cylinder: {
        Eigen::VectorXd y(dimension);
        y[0] = half_height * (2.0 * uniform01(rng) - 1.0);
        if (dimension > 1) y.tail(dimension - 1) = uniform_in_ball(rng, dimension - 1, radius);
        return y;
      }
    }
    return {};
  }

  BodyOracle oracle() const {
    BodyOracle o;
    o.dimension = dimension;
    o.descriptor = {BodyKind::Custom, 0.0, 1.0, radius};
    ReferenceBody self = *this;
    o.gauge = [self](const Eigen::VectorXd& y) { return self.gauge(y); };
    o.support = [self](const Eigen::VectorXd& d) {
      double v = 0.0;
      switch (self.shape) {
        case Shape::Ball: v = self.radius * d.norm(); break;
        case Shape::Cube: v = self.radius * d.lpNorm<1>(); break;
        case Shape::Cylinder:
          v = self.half_height * std::abs(d[0]) + self.radius * d.tail(self.dimension - 1).norm();
          break;
      }
      return SupportValue{v, false};
    };
    o.bound_radius = shape == Shape::Cylinder ? std::hypot(half_height, radius)
                     : shape == Shape::Cube   ? radius * std::sqrt(static_cast<double>(dimension))
                                              : radius;
    return o;
  }
};

/// |body| as hit fraction times |reference|. Each draw also probes the point
/// just beyond the reference boundary on its ray; a body point there means
/// the body is not contained in the reference.
inline Estimate volume_mc(const BodyOracle& body, const ReferenceBody& reference, std::int64_t n_samples,
                          std::uint64_t seed) {
  if (n_samples < 1) throw Error(ErrorCode::InvalidConfig, "n_samples must be >= 1");
  if (body.dimension != reference.dimension) throw Error(ErrorCode::InvalidConfig, "dimension mismatch");
  std::vector<char> hit(static_cast<std::size_t>(n_samples));
  std::vector<char> escaped(hit.size(), 0);
  parallel_for(hit.size(), [&](std::size_t i) {
    CounterRng rng(seed, "volume_mc", i);
    Eigen::VectorXd y = reference.sample(rng);
    hit[i] = body.membership(y, 1e-9) != Membership::Outside ? 1 : 0;
    double g = reference.gauge(y);
    if (g > 0.0 && body.membership(y * ((1.0 + 1e-6) / g), 1e-9) == Membership::Inside) escaped[i] = 1;
  });
  auto bad = std::find(escaped.begin(), escaped.end(), char{1});
  if (bad != escaped.end())
    throw Error(ErrorCode::ContainmentViolated,
                "body leaves the reference near draw " + std::to_string(bad - escaped.begin()));
  std::int64_t k = std::count(hit.begin(), hit.end(), char{1});
  Estimate e = proportion_estimate(k, n_samples, seed, "volume_mc");
  const double vol = reference.volume();
  e.value *= vol;
  e.std_error *= vol;
  return e;
}

}  // namespace hardbody
