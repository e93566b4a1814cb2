// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,3] [--allow-fail 8]
//
// Exit status is 0 when every failing criterion was listed in --allow-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hardbody/experiments.hpp"

using namespace hardbody;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

QuasiOrthogonalSystem verified_design(int n, int m, double c, std::uint64_t& seed) {
  for (;; ++seed) {
    auto sys = generate_design(DesignConfig{n, m, c, seed, DesignMode::Desk});
    if (verify_design(sys).passed) return sys;
  }
}

// --- 1 -------------------------------------------------------------------------

Outcome ac1() {
  int passed = 0;
  for (std::uint64_t s = 0; s < 100; ++s)
    passed += verify_design(generate_design(DesignConfig{256, 4096, 3.0, s, DesignMode::Desk})).passed ? 1 : 0;
  return {passed >= 99, fmt("%d/100 designs verified (need 99)", passed)};
}

// --- 2 -------------------------------------------------------------------------

Outcome ac2() {
  int ok = 0;
  double worst_rel = 0.0;
  std::int64_t offdiag = 0, pairs = 0;
  std::uint64_t seed = 0;
  const double etas[] = {0.0, 0.25, 0.5};
  for (int k = 0; k < 20; ++k) {
    const int n = k < 10 ? 16 : 64, m = 4 * n;
    auto sys = verified_design(n, m, 3.0, seed);
    ++seed;
    const double eta = etas[k % 3];
    auto rep = separation_report(sys, eta);
    // recompute both identities straight from the definitions
    const double shift = 2.0 * (1.0 - eta) * std::sqrt(double(n)) / sys.delta;
    double rel = 0.0;
    for (int i = 0; i < m; ++i)
      for (int si : {1, -1}) {
        Eigen::VectorXd plus(n + 1);
        plus << 1.0 - eta, si * sys.x(i);
        for (int j = 0; j < m; ++j)
          for (int sj : {1, -1}) {
            Eigen::VectorXd minus(n + 1);
            minus << -2.0 * std::sqrt(double(n)) / sys.delta, sj * sys.x(j);
            const double g = sys.x(i).dot(sys.x(j));
            const double want = -shift + si * sj * g;
            rel = std::max(rel, std::abs(plus.dot(minus) - want) / (shift + std::abs(g)));
            ++pairs;
          }
      }
    worst_rel = std::max({worst_rel, rel, rep.identity_max_rel_error});
    offdiag += rep.offdiag_violations;
    ok += (rep.identities_hold && rel <= 1e-9 && rep.offdiag_violations == 0) ? 1 : 0;
  }
  return {ok == 20, fmt("%d/20 designs clean, %lld pairs, max rel identity error %.2e, off-diagonal violations %lld", ok,
                        (long long)pairs, worst_rel, (long long)offdiag)};
}

// --- 3 -------------------------------------------------------------------------

Outcome ac3() {
  // hand formulas at the three worked points
  struct Hand {
    double eta, h, kappa, scale;
  };
  const Hand hand[] = {{0.3, 0.0, 1.0, 1.0}, {0.1, 0.5, (1.0 - 0.45) / 1.05, 1.0 / 0.55}, {0.0, -1.0, 2.0, 0.5}};
  int ulps_bad = 0;
  for (const auto& c : hand) {
    auto r = polar_shift(c.eta, c.h);
    auto within_ulp = [](double a, double b) { return a == b || std::nextafter(a, b) == b; };
    if (!within_ulp(r.kappa, c.kappa) || !within_ulp(r.scale, c.scale)) ++ulps_bad;
  }
  double worst = 0.0;
  int runs = 0, bad = 0;
  std::uint64_t seed = 0;
  for (int n : {2, 8}) {
    auto sys = verified_design(n, 4 * n, 3.0, seed);
    for (double eta : {0.0, 0.1, 0.25})
      for (double h : {-1.0, 0.0, 0.3}) {
        auto rep = verify_polar_shift(sys, eta, h, 10000, 1000 + runs, 1e-6);
        worst = std::max(worst, rep.disagreement_fraction);
        bad += rep.disagreement_fraction <= 0.005 ? 0 : 1;
        ++runs;
      }
  }
  return {bad == 0 && ulps_bad == 0,
          fmt("%d/%d grid points within 0.005 (worst %.4f); hand formulas off by >1 ulp: %d", runs - bad, runs, worst,
              ulps_bad)};
}

// --- 4 -------------------------------------------------------------------------

Outcome ac4() {
  using boost::math::quadrature::gauss_kronrod;
  double worst = 0.0;
  for (double eta : {0.1, 0.5, 1.0})
    for (int n : {1, 2, 3}) {
      Estimate unit{1.0, 0.0, 0, 0, "unit"};
      auto section = [&](double h) { return std::pow(1.0 + eta * h, n); };
      const double below = gauss_kronrod<double, 61>::integrate(section, -1.0 / eta, 0.0);
      const double prime = gauss_kronrod<double, 61>::integrate(section, -1.0 / eta, 0.98);
      const double a = cone_volume_closed_form(ConeVolumeKind::CMinusBelowZero, eta, unit, n).value;
      const double b = cone_volume_closed_form(ConeVolumeKind::CMinusPrime, eta, unit, n).value;
      worst = std::max({worst, std::abs(a - below) / below, std::abs(b - prime) / prime});
    }
  return {worst <= 0.005, fmt("max relative deviation from quadrature %.2e over 9 cases (limit 0.5%%)", worst)};
}

// --- 5 -------------------------------------------------------------------------

Outcome ac5() {
  std::string d;
  bool ok = true;
  for (int n : {1, 8, 64}) {
    auto e = mean_width(ball_oracle(n), 100000, 50 + n);
    const double exact = std::sqrt(2.0) * std::exp(std::lgamma((n + 1) / 2.0) - std::lgamma(n / 2.0));
    const double z = std::abs(e.value - exact) / e.std_error;
    ok = ok && z <= 3.0;
    d += fmt("n=%d z=%.2f; ", n, z);
  }
  // c = 100 breaks the range c n <= m at n = 1000, m = 10^4, so the
  // generator runs without the range check
  auto sys = generate_design(DesignConfig{1000, 10000, 100.0, 5, DesignMode::Desk});
  auto wq = mean_width(build_Q(sys), 1000, 6);
  const double ratio = wq.value / ball_mean_width(1000);
  ok = ok && ratio <= 0.05;
  d += fmt("w(Q)/w(B)=%.4f (stderr %.1e, limit 0.05)", ratio, wq.std_error / ball_mean_width(1000));
  return {ok, d};
}

// --- 6 -------------------------------------------------------------------------

Outcome ac6() {
  std::uint64_t seed = 0;
  auto sys = verified_design(16, 64, 3.0, seed);
  const BodyOracle K = build_K(sys);
  ChainSpec chain;
  auto bc = detail::barycenter_config(chain, k_axis_midpoint(16, 0.0));
  auto bary = estimate_barycenter(K, bc, 1);
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(17);
  e0[0] = 1.0;
  auto g = grunbaum_check(K, e0, bary.eta, 2000, 2, bc.chain, 4);
  const bool k_ok = g.value >= grunbaum_bound() - 3.0 * g.std_error;

  auto ball = grunbaum_check(ball_oracle(3), Eigen::Vector3d(1, 0, 0), 0.0, 4000, 3);
  Eigen::MatrixXd A(3, 2);
  A << -1, 0, 0, -1, 1, 1;
  Eigen::VectorXd b = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  auto tri = grunbaum_check(halfspace_oracle(A, b), Eigen::Vector2d(0, 1), 0.0, 4000, 4);
  const bool ball_ok = std::abs(ball.value - 0.5) <= 3.0 * ball.std_error;
  const bool tri_ok = std::abs(tri.value - 4.0 / 9.0) <= 3.0 * tri.std_error;
  return {k_ok && ball_ok && tri_ok,
          fmt("K: %.3f +- %.3f at eta=%.4f (need >= %.3f - 3se); ball %.3f +- %.3f; triangle %.3f +- %.3f", g.value,
              g.std_error, bary.eta, grunbaum_bound(), ball.value, ball.std_error, tri.value, tri.std_error)};
}

// --- 7 -------------------------------------------------------------------------

Outcome ac7() {
  std::uint64_t seed = 0;
  auto sys = verified_design(16, 256, 3.0, seed);
  const int n = 16, m = 256;
  const double k_scale = std::sqrt(double(n)) / sys.delta;
  int matches = 0, nonempty = 0, full = 0;
  std::string first_diff;
  for (int inst = 0; inst < 50; ++inst) {
    CounterRng rng(77, "ac7", inst);
    const int N = 1 + static_cast<int>(uniform01(rng) * 64);
    const double kappa = inst % 2 ? 1.0 : 0.5 + 2.0 * uniform01(rng);
    // scales straddle the threshold: empty, partial and full coverings all occur
    const double lo = inst % 4 == 0 ? 0.0 : inst % 4 == 3 ? 20.0 : 7.0;
    Eigen::MatrixXd v(N, n + 1);
    for (int a = 0; a < N; ++a) {
      const int i = static_cast<int>(uniform01(rng) * m);
      Eigen::VectorXd w(n + 1);
      w << -2.0 * k_scale, sys.x(i);
      w += 0.3 * gaussian_vector(rng, n + 1);
      v.row(a) = ((lo + 6.0 * uniform01(rng)) * w).transpose();
    }
    auto P = make_polytope(v, "ac7");
    auto cert = covering_certificate(P, sys, kappa);

    // brute force
    const double k1 = std::max(kappa, 1.0), d2 = sys.delta * sys.delta;
    const double thr = 12.0 * k1;
    std::vector<std::vector<int>> sets(P.size());
    std::vector<int> uncovered;
    std::vector<char> hit(m, 0);
    int max_cover = 0;
    for (int a = 0; a < P.size(); ++a) {
      for (int i = 0; i < m; ++i) {
        double ip = P.vertices(a, 0) * (-2.0 * k_scale);
        for (int k = 0; k < n; ++k) ip += P.vertices(a, k + 1) * sys.vectors(i, k);
        if (ip >= thr - 1e-9) {
          sets[a].push_back(i);
          hit[i] = 1;
        }
      }
      max_cover = std::max<int>(max_cover, sets[a].size());
    }
    for (int i = 0; i < m; ++i)
      if (!hit[i]) uncovered.push_back(i);
    const double per_vertex = 4.0 * n / (9.0 * d2), lower = 9.0 * d2 * m / (4.0 * n);
    const bool all = uncovered.empty();
    const int emp = all && max_cover > 0 ? (m + max_cover - 1) / max_cover : 0;
    const auto concl = all ? CoveringConclusion::LowerBoundHolds : CoveringConclusion::Inconclusive;

    std::vector<std::string> diff;
    if (std::abs(cert.threshold - thr) > 1e-12 * thr) diff.push_back("threshold");
    if (cert.covering_sets != sets) diff.push_back("covering_sets");
    if (cert.uncovered != uncovered) diff.push_back("uncovered");
    if (std::abs(cert.per_vertex_bound - per_vertex) > 1e-12 * per_vertex) diff.push_back("per_vertex_bound");
    if (std::abs(cert.implied_lower_bound - lower) > 1e-12 * lower) diff.push_back("implied_lower_bound");
    if (cert.max_cover != max_cover) diff.push_back("max_cover");
    if (cert.empirical_lower_bound != emp) diff.push_back("empirical_lower_bound");
    if (cert.per_vertex_respected != (max_cover <= per_vertex + 1e-9)) diff.push_back("per_vertex_respected");
    if (cert.conclusion != concl) diff.push_back("conclusion");
    nonempty += max_cover > 0 ? 1 : 0;
    full += all ? 1 : 0;
    if (diff.empty()) {
      ++matches;
    } else if (first_diff.empty()) {
      first_diff = fmt(" (instance %d differs in %s)", inst, diff.front().c_str());
    }
  }
  return {matches == 50, fmt("%d/50 match brute force (%d fully covered, %d partial, %d empty)%s", matches, full,
                             nonempty - full, 50 - nonempty, first_diff.c_str())};
}

// --- 8 -------------------------------------------------------------------------

Outcome ac8() {
  // N = m/(2n) must reach n + 3 for a full-dimensional random hull in R^(n+1)
  const int n = 8, m = 256;
  std::uint64_t seed = 0;
  auto sys = verified_design(n, m, 3.0, seed);
  ChainSpec chain;
  auto eta = detail::resolve_eta(std::nullopt, sys, chain, 31);
  const BodyOracle body = build_K_eta(sys, eta.eta);
  const Eigen::VectorXd center = detail::shifted_center(eta, n);
  const auto pc = paper_constants_for_delta(n, m, 1.0, sys.delta);
  const Eigen::MatrixXd forced = minus_matrix(sys);

  int above = 0, unbounded = 0;
  double min_lambda = kInf;
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto P = detail::build_candidate(body, "random", m / (2 * n), 0, chain, k_axis_midpoint(n, eta.eta), center, 100 + s);
    nlohmann::json note;
    auto lam = detail::ratio_or_infinite(P, body, center, 500, 200 + s, forced, note);
    above += lam.lambda_lower > pc.R ? 1 : 0;
    unbounded += std::isinf(lam.lambda_lower) ? 1 : 0;
    min_lambda = std::min(min_lambda, lam.lambda_lower);
  }

  int outer_ok = 0;
  std::string why;
  double best_lambda = kInf;
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto P = detail::build_candidate(body, "random", 4 * m / n, 0, chain, k_axis_midpoint(n, eta.eta), center, 300 + s);
    // any R that passes must be at least this
    nlohmann::json note;
    best_lambda = std::min(best_lambda, detail::ratio_or_infinite(P, body, center, 500, 500 + s, forced, note).lambda_lower);
    try {
      outer_ok += verify_sandwich(P, body, sys, eta.eta, pc.R, 500, 400 + s).outer_necessary_passed ? 1 : 0;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InvalidConfig) throw;
      why = e.what();
    }
  }
  return {above >= 9 && outer_ok >= 5,
          fmt("eta=%.4f R=%.3e; N=%d: lambda_lower > R in %d/10 (min %.3g, %d unbounded); N=%d: outer conditions pass "
              "in %d/10 (need 5), smallest lambda_lower %.3g%s%s",
              eta.eta, pc.R, m / (2 * n), above, min_lambda, unbounded, 4 * m / n, outer_ok, best_lambda,
              why.empty() ? "" : ": ", why.c_str())};
}

// --- 9 -------------------------------------------------------------------------

/// Facets of the hull of points in general position: d-subsets whose
/// hyperplane leaves every other point strictly on one side.
int brute_force_facets(const Eigen::MatrixXd& v) {
  const int N = static_cast<int>(v.rows()), d = static_cast<int>(v.cols());
  std::vector<int> idx(d);
  for (int k = 0; k < d; ++k) idx[k] = k;
  int count = 0;
  const double scale = v.cwiseAbs().maxCoeff();
  while (true) {
    Eigen::MatrixXd diff(d - 1, d);
    for (int k = 1; k < d; ++k) diff.row(k - 1) = v.row(idx[k]) - v.row(idx[0]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(diff);
    Eigen::MatrixXd ker = lu.kernel();
    if (ker.cols() == 1) {
      Eigen::VectorXd normal = ker.col(0).normalized();
      const double off = normal.dot(v.row(idx[0]).transpose());
      int pos = 0, neg = 0;
      for (int a = 0; a < N; ++a) {
        if (std::find(idx.begin(), idx.end(), a) != idx.end()) continue;
        const double s = normal.dot(v.row(a).transpose()) - off;
        if (s > 1e-9 * scale) ++pos;
        if (s < -1e-9 * scale) ++neg;
      }
      if (pos == 0 || neg == 0) ++count;
    }
    int k = d - 1;
    while (k >= 0 && idx[k] == N - d + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
  }
  return count;
}

Outcome ac9() {
  int mismatches = 0, total = 0;
  for (int k = 0; k < 100; ++k) {
    const int dim = 3 + k % 3, nv = 2 * dim + 4;
    for (int attempt = 0;; ++attempt) {
      CounterRng rng(9, "ac9", k * 1000 + attempt);
      Eigen::MatrixXd v(nv, dim);
      for (int a = 0; a < nv; ++a) v.row(a) = gaussian_vector(rng, dim).transpose();
      DualCount dc;
      try {
        dc = dual_count(make_polytope(v, "ac9"));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::OriginNotInterior) continue;
        throw;
      }
      ++total;
      if (!dc.match || dc.facet_count != brute_force_facets(v)) ++mismatches;
      break;
    }
  }
  return {mismatches == 0 && total == 100, fmt("%d polytopes in R^3..R^5, %d mismatches", total, mismatches)};
}

// --- 10 ------------------------------------------------------------------------

Outcome ac10() {
  const auto doc = nlohmann::json::parse(R"({
    "seed": 3, "samples": 2000,
    "design": {"n": 32, "m": 256},
    "widths": {"n": 16, "m": 128, "q_samples": 500},
    "centers": {"n": 4, "m": 16, "grunbaum_samples": 400, "volume_samples": 2000, "santalo": true, "gamma": true,
                "chain": {"chains": 4, "points_per_chain": 40, "burn_in": 40, "thinning": 2}},
    "hardness": {"n": 8, "m": 64, "eta": "auto", "candidate": "random:N=12", "directions": 200,
                 "chain": {"chains": 4, "points_per_chain": 40, "burn_in": 40, "thinning": 2}},
    "dual": {"polytopes": 12, "points": 300},
    "approx": {"n": 4, "m": 32, "N": [8, 24], "directions": 200, "budget": 64,
               "chain": {"chains": 4, "points_per_chain": 40, "burn_in": 40, "thinning": 2}}
  })");
  const auto cfg = parse_config(doc);
  std::vector<std::string> outputs;
  for (const char* workers : {"1", "4", "16"}) {
    setenv("HARDBODY_THREADS", workers, 1);
    std::string all;
    for (const auto& name : command_names()) {
      auto r = run_command(name, cfg);
      all += dump_json(to_json(r)) + to_csv(r);
    }
    outputs.push_back(std::move(all));
  }
  unsetenv("HARDBODY_THREADS");
  const bool same = outputs[0] == outputs[1] && outputs[0] == outputs[2];
  return {same, fmt("6 reports (%zu bytes) %s across 1, 4, 16 workers", outputs[0].size(),
                    same ? "byte-identical" : "DIFFER")};
}

std::set<int> parse_set(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only, allowed;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) only = parse_set(argv[++i]);
    else if (a == "--allow-fail" && i + 1 < argc) allowed = parse_set(argv[++i]);
    else {
      std::fprintf(stderr, "usage: acceptance [--only 1,2] [--allow-fail 8]\n");
      return 64;
    }
  }
  struct Criterion {
    int id;
    const char* title;
    double budget_s;  // <= 0: no runtime limit
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> all{
      {1, "design pass rate", 10, ac1},       {2, "separation identities", 5, ac2},
      {3, "polar-shift identity", 60, ac3},   {4, "cone volumes", 1, ac4},
      {5, "mean width", 60, ac5},             {6, "Grunbaum fractions", 120, ac6},
      {7, "covering vs brute force", 30, ac7}, {8, "lower-bound phenomenon", 600, ac8},
      {9, "duality counts", 30, ac9},         {10, "determinism", 0, ac10},
  };
  int failed = 0, unexpected = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s <= 0 || secs < c.budget_s;
    const bool pass = o.pass && in_time;
    std::string timing = c.budget_s > 0 ? fmt("%.1f s / %.0f s", secs, c.budget_s) : fmt("%.1f s", secs);
    std::printf("AC%-2d %s  %s: %s [%s]\n", c.id, pass ? "PASS" : "FAIL", c.title, o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    if (!pass) {
      ++failed;
      if (!allowed.count(c.id)) ++unexpected;
    }
  }
  std::printf("%d criteria failed, %d not covered by --allow-fail\n", failed, unexpected);
  return unexpected == 0 ? 0 : 1;
}
