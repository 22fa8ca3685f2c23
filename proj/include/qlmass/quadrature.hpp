#pragma once

// Tensor-product quadrature on coordinate hemispheres, their equators, the
// boundary disks they cap and solid half-ball shells, with deterministic
// compensated summation.

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "qlmass/common.hpp"
#include "qlmass/curvature_frames.hpp"
#include "qlmass/metric_models.hpp"

namespace qlmass {

/// Gauss-Legendre nodes and weights on [a, b].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int count, double a, double b) {
  if (count < 1) throw ParameterError("gauss_legendre: need at least one node");
  std::vector<double> nodes(count), weights(count);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (count + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= count; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = count * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes[i] = mid - half * z;
    nodes[count - 1 - i] = mid + half * z;
    weights[i] = weights[count - 1 - i] = half * w;
  }
  return {nodes, weights};
}

enum class Domain { kHemisphere, kEquator, kBoundaryDisk, kHalfBallShell };

inline const char* domain_name(Domain d) {
  switch (d) {
    case Domain::kHemisphere: return "hemisphere";
    case Domain::kEquator: return "equator";
    case Domain::kBoundaryDisk: return "boundary-disk";
    case Domain::kHalfBallShell: return "half-ball-shell";
  }
  return "?";
}

enum class Measure { kEuclidean, kMetric };

template <int N>
struct QuadratureRule {
  Domain domain = Domain::kHemisphere;
  double radius = 0.0;
  double inner_radius = 0.0;
  int order = 0;
  std::vector<Vec<N>> nodes;
  /// Euclidean measure weights.
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double total_weight() const {
    CompensatedSum s;
    for (double w : weights) s += w;
    return s.value();
  }
};

namespace detail {

struct Direction {
  std::vector<double> x;
  double weight;
};

/// One-dimensional rule for a colatitude with weight sin^p(theta) on
/// [0, theta_max] (theta_max = pi or pi/2). For odd p the weight is a
/// polynomial in cos(theta) and Gauss-Legendre in the cosine is exact; for
/// even p Gauss-Legendre is applied in theta directly.
inline std::vector<std::pair<double, double>> colatitude_rule(int p, bool half, int order) {
  std::vector<std::pair<double, double>> out;  // (theta, weight)
  if (p % 2 == 1) {
    const auto [t, w] = gauss_legendre(order, half ? 0.0 : -1.0, 1.0);
    for (int i = 0; i < order; ++i) {
      out.emplace_back(std::acos(t[i]), w[i] * std::pow(1.0 - t[i] * t[i], 0.5 * (p - 1)));
    }
  } else {
    const auto [th, w] = gauss_legendre(order, 0.0, half ? 0.5 * std::numbers::pi : std::numbers::pi);
    for (int i = 0; i < order; ++i) out.emplace_back(th[i], w[i] * std::pow(std::sin(th[i]), p));
  }
  return out;
}

/// Rule on the unit sphere S^k in R^{k+1}.
inline std::vector<Direction> unit_sphere(int k, int order) {
  std::vector<Direction> out;
  if (k == 1) {
    const int m = 2 * order;
    for (int j = 0; j < m; ++j) {
      const double phi = 2.0 * std::numbers::pi * (j + 0.5) / m;
      out.push_back({{std::cos(phi), std::sin(phi)}, 2.0 * std::numbers::pi / m});
    }
    return out;
  }
  const auto sub = unit_sphere(k - 1, order);
  for (const auto& [theta, w] : colatitude_rule(k - 1, false, order)) {
    for (const auto& d : sub) {
      Direction e;
      e.x.push_back(std::cos(theta));
      for (double c : d.x) e.x.push_back(std::sin(theta) * c);
      e.weight = w * d.weight;
      out.push_back(std::move(e));
    }
  }
  return out;
}

/// Colatitude rule on [0, pi/2] with weight sin^p(theta), graded towards the
/// equator: panels in s = pi/2 - theta are [0, s0], [s0, 2 s0], ... and the
/// last one ends at s = pi/2.
inline std::vector<std::pair<double, double>> graded_colatitude_rule(int p, double s0, int per_panel) {
  std::vector<double> edges{0.0, s0};
  while (edges.back() < 0.5 * std::numbers::pi) edges.push_back(std::min(0.5 * std::numbers::pi, 2.0 * edges.back()));
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const auto [s, w] = gauss_legendre(per_panel, edges[i], edges[i + 1]);
    for (int j = 0; j < per_panel; ++j) {
      const double theta = 0.5 * std::numbers::pi - s[j];
      out.emplace_back(theta, w[j] * std::pow(std::sin(theta), p));
    }
  }
  return out;
}

/// Rule on the unit hemisphere {|x| = 1, x_0 >= 0} of S^k, pole along x_0.
/// A positive layer s0 grades the colatitude towards the equator.
inline std::vector<Direction> unit_hemisphere(int k, int order, double s0 = 0.0) {
  std::vector<Direction> out;
  const auto sub = unit_sphere(k - 1, order);
  const auto colatitudes = s0 > 0.0 && s0 < 0.25 * std::numbers::pi
                               ? graded_colatitude_rule(k - 1, s0, std::max(4, order / 2))
                               : colatitude_rule(k - 1, true, order);
  for (const auto& [theta, w] : colatitudes) {
    for (const auto& d : sub) {
      Direction e;
      e.x.push_back(std::cos(theta));
      for (double c : d.x) e.x.push_back(std::sin(theta) * c);
      e.weight = w * d.weight;
      out.push_back(std::move(e));
    }
  }
  return out;
}

/// Composite Gauss-Legendre nodes on [a, b]; panels grow geometrically with
/// ratio at most 2 (the first panel is [0, min(b, 1)] when a = 0).
inline std::pair<std::vector<double>, std::vector<double>> radial_panels(double a, double b, int per_panel) {
  std::vector<double> edges;
  if (a == 0.0) {
    edges.push_back(0.0);
    double e = std::min(b, 1.0);
    edges.push_back(e);
    while (e < b) {
      e = std::min(b, 2.0 * e);
      edges.push_back(e);
    }
  } else {
    const int panels = std::max(1, static_cast<int>(std::ceil(std::log2(b / a) - 1e-12)));
    const double ratio = std::pow(b / a, 1.0 / panels);
    edges.push_back(a);
    for (int p = 1; p < panels; ++p) edges.push_back(a * std::pow(ratio, p));
    edges.push_back(b);
  }
  std::vector<double> nodes, weights;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const auto [x, w] = gauss_legendre(per_panel, edges[p], edges[p + 1]);
    nodes.insert(nodes.end(), x.begin(), x.end());
    weights.insert(weights.end(), w.begin(), w.end());
  }
  return {nodes, weights};
}

inline void check_rule_params(double r, int order, int min_order) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("quadrature radius must be positive");
  if (order < min_order) {
    throw ParameterError("quadrature order must be at least " + std::to_string(min_order));
  }
}

}  // namespace detail

/// Hemisphere {|x| = r, x1 >= 0}: colatitude from the x1 axis times a rule
/// on the remaining sphere; no node lies on the pole or the equator.
/// boundary_layer > 0 is the x1-thickness of a layer above the boundary that
/// the integrand varies across; colatitudes are then graded to resolve it.
template <int N>
QuadratureRule<N> hemisphere_rule(double r, int order, double boundary_layer = 0.0) {
  detail::check_rule_params(r, order, 4);
  QuadratureRule<N> rule;
  rule.domain = Domain::kHemisphere;
  rule.radius = r;
  rule.order = order;
  const double scale = std::pow(r, N - 1);
  for (const auto& d : detail::unit_hemisphere(N - 1, order, boundary_layer / r)) {
    Vec<N> x;
    for (int i = 0; i < N; ++i) x[i] = r * d.x[i];
    rule.nodes.push_back(x);
    rule.weights.push_back(scale * d.weight);
  }
  return rule;
}

/// Equator {|x| = r, x1 = 0} = S^{n-2}(r) inside dM.
template <int N>
QuadratureRule<N> equator_rule(double r, int order) {
  detail::check_rule_params(r, order, 2);
  QuadratureRule<N> rule;
  rule.domain = Domain::kEquator;
  rule.radius = r;
  rule.order = order;
  const double scale = std::pow(r, N - 2);
  for (const auto& d : detail::unit_sphere(N - 2, order)) {
    Vec<N> x = Vec<N>::Zero();
    for (int i = 1; i < N; ++i) x[i] = r * d.x[i - 1];
    rule.nodes.push_back(x);
    rule.weights.push_back(scale * d.weight);
  }
  return rule;
}

/// Boundary disk {|x| <= r, x1 = 0} minus the inner disk of radius r0.
template <int N>
QuadratureRule<N> boundary_disk_rule(double r0, double r, int order, int radial_per_panel = 16) {
  detail::check_rule_params(r, order, 2);
  if (!(r0 >= 0.0 && r0 < r)) throw ParameterError("boundary_disk_rule: need 0 <= r0 < r");
  QuadratureRule<N> rule;
  rule.domain = Domain::kBoundaryDisk;
  rule.radius = r;
  rule.inner_radius = r0;
  rule.order = order;
  const auto dirs = detail::unit_sphere(N - 2, order);
  const auto [s, ws] = detail::radial_panels(r0, r, radial_per_panel);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double jac = ws[k] * std::pow(s[k], N - 2);
    for (const auto& d : dirs) {
      Vec<N> x = Vec<N>::Zero();
      for (int i = 1; i < N; ++i) x[i] = s[k] * d.x[i - 1];
      rule.nodes.push_back(x);
      rule.weights.push_back(jac * d.weight);
    }
  }
  return rule;
}

/// Solid half-ball shell {r0 <= |x| <= r, x1 >= 0}.
template <int N>
QuadratureRule<N> half_ball_shell_rule(double r0, double r, int order, int radial_per_panel = 16) {
  detail::check_rule_params(r, order, 4);
  if (!(r0 >= 0.0 && r0 < r)) throw ParameterError("half_ball_shell_rule: need 0 <= r0 < r");
  QuadratureRule<N> rule;
  rule.domain = Domain::kHalfBallShell;
  rule.radius = r;
  rule.inner_radius = r0;
  rule.order = order;
  const auto dirs = detail::unit_hemisphere(N - 1, order);
  const auto [s, ws] = detail::radial_panels(r0, r, radial_per_panel);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double jac = ws[k] * std::pow(s[k], N - 1);
    for (const auto& d : dirs) {
      Vec<N> x;
      for (int i = 0; i < N; ++i) x[i] = s[k] * d.x[i];
      rule.nodes.push_back(x);
      rule.weights.push_back(jac * d.weight);
    }
  }
  return rule;
}

/// Ratio of the metric to the Euclidean measure of the rule's domain at x,
/// from the Gram determinant of g on a Euclidean orthonormal tangent basis.
template <int N>
double measure_ratio(const Mat<N>& g, Domain domain, const Vec<N>& x) {
  switch (domain) {
    case Domain::kHemisphere: {
      const auto e = detail::euclidean_complement<N, N - 1>({Vec<N>(x / x.norm())});
      return detail::gram_root<N, N - 1>(e, g);
    }
    case Domain::kEquator: {
      const auto e = detail::euclidean_complement<N, N - 2>({Vec<N>::Unit(0), Vec<N>(x / x.norm())});
      return detail::gram_root<N, N - 2>(e, g);
    }
    case Domain::kBoundaryDisk:
      return std::sqrt(g.template bottomRightCorner<N - 1, N - 1>().determinant());
    case Domain::kHalfBallShell:
      return std::sqrt(g.determinant());
  }
  return 1.0;
}

namespace detail {

template <int N>
[[noreturn]] inline void throw_non_finite(const Vec<N>& x, Domain d) {
  std::ostringstream os;
  os << "non-finite integrand on " << domain_name(d) << " at x = (";
  for (int i = 0; i < N; ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  throw GeometryError(os.str());
}

}  // namespace detail

/// sum_k w_k f(x_k) [* measure ratio], accumulated in node order.
template <int N, class Integrand>
double surface_integral(const MetricField<N>& field, const QuadratureRule<N>& rule, Integrand&& integrand,
                        Measure measure) {
  CompensatedSum sum;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const Vec<N>& x = rule.nodes[k];
    double value = integrand(x);
    if (measure == Measure::kMetric) value *= measure_ratio<N>(field.metric(x), rule.domain, x);
    if (!std::isfinite(value)) detail::throw_non_finite<N>(x, rule.domain);
    sum += rule.weights[k] * value;
  }
  return sum.value();
}

struct AreaResult {
  double area = 0.0;
  /// (1 / (2 |hemisphere|_euclid)) * integral of h^ij sigma_ij dsigma_euclid,
  /// with h the Euclidean induced metric; 1/(4 pi r^2) normalization at n = 3.
  double theta = 0.0;
};

/// Metric area of the hemisphere of radius r.
template <int N>
AreaResult area(const MetricField<N>& field, double r, int order) {
  const QuadratureRule<N> rule = hemisphere_rule<N>(r, order, field.boundary_layer());
  CompensatedSum a, t;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const Vec<N>& x = rule.nodes[k];
    const Mat<N> g = field.metric(x);
    const Vec<N> xhat = x / x.norm();
    const Mat<N> sigma = g - Mat<N>::Identity();
    const double trace_tan = sigma.trace() - xhat.dot(sigma * xhat);
    const double ratio = measure_ratio<N>(g, Domain::kHemisphere, x);
    if (!std::isfinite(ratio) || !std::isfinite(trace_tan)) detail::throw_non_finite<N>(x, rule.domain);
    a += rule.weights[k] * ratio;
    t += rule.weights[k] * trace_tan;
  }
  return {a.value(), t.value() / (2.0 * euclidean_hemisphere_area(N, r))};
}

/// V(r) - V(r0) by the coarea formula: radial Gauss-Legendre of
/// integral over the hemisphere of radius s of dsigma_g / |grad s|_g.
template <int N>
double volume(const MetricField<N>& field, double r0, double r, int order, int radial_per_panel = 16) {
  if (!(r0 >= 0.0 && r0 < r)) throw ParameterError("volume: need 0 <= r0 < r");
  const QuadratureRule<N> unit = hemisphere_rule<N>(1.0, order);
  const auto [s, ws] = detail::radial_panels(r0, r, radial_per_panel);
  CompensatedSum total;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double jac = std::pow(s[i], N - 1);
    CompensatedSum shell;
    for (std::size_t k = 0; k < unit.size(); ++k) {
      const Vec<N> xhat = unit.nodes[k];
      const Vec<N> x = s[i] * xhat;
      const Mat<N> g = field.metric(x);
      const Mat<N> ginv = detail::checked_inverse(g);
      const double grad_s = std::sqrt(xhat.dot(ginv * xhat));
      const double value = measure_ratio<N>(g, Domain::kHemisphere, x) / grad_s;
      if (!std::isfinite(value)) detail::throw_non_finite<N>(x, Domain::kHalfBallShell);
      shell += unit.weights[k] * value;
    }
    total += ws[i] * jac * shell.value();
  }
  return total.value();
}

}  // namespace qlmass
