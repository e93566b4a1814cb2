#pragma once

// Vertex-list polytopes and brute-force exact facet/vertex enumeration for
// small dimensions.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hardbody/error.hpp"

namespace hardbody {

/// conv of the rows of `vertices`. For lifted polytopes column 0 is the height.
struct CandidatePolytope {
  Eigen::MatrixXd vertices;
  std::string label;

  int dimension() const { return static_cast<int>(vertices.cols()); }
  int size() const { return static_cast<int>(vertices.rows()); }
  Eigen::VectorXd vertex(int a) const { return vertices.row(a).transpose(); }
  double support(const Eigen::Ref<const Eigen::VectorXd>& d) const { return (vertices * d).maxCoeff(); }
};

/// Keeps the first of any group of points closer than `tol` in max-norm.
inline CandidatePolytope make_polytope(const Eigen::MatrixXd& points, std::string label, double tol = 1e-12) {
  if (points.rows() == 0) throw Error(ErrorCode::InvalidConfig, "a polytope needs at least one vertex");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    bool dup = false;
    for (Eigen::Index k : keep)
      if ((points.row(i) - points.row(k)).lpNorm<Eigen::Infinity>() <= tol) {
        dup = true;
        break;
      }
    if (!dup) keep.push_back(i);
  }
  CandidatePolytope p;
  p.label = std::move(label);
  p.vertices.resize(static_cast<Eigen::Index>(keep.size()), points.cols());
  for (std::size_t k = 0; k < keep.size(); ++k) p.vertices.row(static_cast<Eigen::Index>(k)) = points.row(keep[k]);
  return p;
}

inline nlohmann::json to_json(const CandidatePolytope& p) {
  nlohmann::json v = nlohmann::json::array();
  for (Eigen::Index i = 0; i < p.vertices.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < p.vertices.cols(); ++k) row.push_back(p.vertices(i, k));
    v.push_back(std::move(row));
  }
  return {{"label", p.label}, {"vertices", std::move(v)}};
}

/// Facet {x : <normal, x> = offset}, |normal| = 1, polytope on the <= side.
struct Facet {
  Eigen::VectorXd normal;
  double offset = 0.0;
  std::vector<int> vertices;
};

inline constexpr int kMaxEnumerationDimension = 8;

namespace detail {

/// Calls fn(indices) for every k-subset of [0, count) in lexicographic order.
template <class Fn>
void for_each_subset(int count, int k, Fn&& fn) {
  if (k > count || k <= 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == count - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// Facets of conv(rows of V) by testing the hyperplane through every
/// affinely independent n-subset. Empty when the hull is not full-dimensional.
inline std::vector<Facet> hull_facets(const Eigen::MatrixXd& v, double rel_tol = 1e-9) {
  const int n = static_cast<int>(v.cols());
  const int count = static_cast<int>(v.rows());
  if (n > kMaxEnumerationDimension)
    throw Error(ErrorCode::DimensionTooLarge, "exact enumeration is limited to dimension 8");
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  const double tol = rel_tol * scale;
  std::vector<Facet> facets;
  if (n == 1) {
    Facet hi{Eigen::VectorXd::Ones(1), v.col(0).maxCoeff(), {}};
    Facet lo{-Eigen::VectorXd::Ones(1), -v.col(0).minCoeff(), {}};
    if (hi.offset + lo.offset <= tol) return facets;
    for (int i = 0; i < count; ++i) {
      if (std::abs(v(i, 0) - hi.offset) <= tol) hi.vertices.push_back(i);
      if (std::abs(-v(i, 0) - lo.offset) <= tol) lo.vertices.push_back(i);
    }
    return {hi, lo};
  }
  detail::for_each_subset(count, n, [&](const std::vector<int>& s) {
    Eigen::MatrixXd diff(n - 1, n);
    for (int k = 1; k < n; ++k) diff.row(k - 1) = v.row(s[k]) - v.row(s[0]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(diff);
    lu.setThreshold(1e-10);
    if (lu.rank() != n - 1) return;
    Eigen::VectorXd a = lu.kernel().col(0);
    a.normalize();
    double b = v.row(s[0]).dot(a);
    Eigen::VectorXd side = v * a - Eigen::VectorXd::Constant(count, b);
    if (side.maxCoeff() > tol) {
      if (side.minCoeff() < -tol) return;
      a = -a;
      b = -b;
      side = -side;
    }
    for (const auto& f : facets)
      if ((f.normal - a).lpNorm<Eigen::Infinity>() <= 1e-8 && std::abs(f.offset - b) <= tol) return;
    Facet f{a, b, {}};
    for (int i = 0; i < count; ++i)
      if (std::abs(side[i]) <= tol) f.vertices.push_back(i);
    facets.push_back(std::move(f));
  });
  return facets;
}

/// Vertices of {y : <a_i, y> <= 1 for all rows a_i}, by solving every
/// n-subset of the constraints as equalities and keeping feasible solutions.
inline std::vector<Eigen::VectorXd> polar_vertices_direct(const Eigen::MatrixXd& a, double rel_tol = 1e-9) {
  const int n = static_cast<int>(a.cols());
  const int count = static_cast<int>(a.rows());
  if (n > kMaxEnumerationDimension)
    throw Error(ErrorCode::DimensionTooLarge, "exact enumeration is limited to dimension 8");
  std::vector<Eigen::VectorXd> out;
  detail::for_each_subset(count, n, [&](const std::vector<int>& s) {
    Eigen::MatrixXd m(n, n);
    for (int k = 0; k < n; ++k) m.row(k) = a.row(s[k]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) return;
    Eigen::VectorXd y = lu.solve(Eigen::VectorXd::Ones(n));
    const double tol = rel_tol * std::max(1.0, y.lpNorm<Eigen::Infinity>() * a.cwiseAbs().maxCoeff());
    if ((a * y).maxCoeff() > 1.0 + tol) return;
    for (const auto& w : out)
      if ((w - y).lpNorm<Eigen::Infinity>() <= tol) return;
    out.push_back(std::move(y));
  });
  return out;
}

}  // namespace hardbody
