#pragma once

// Decay diagnostics: sup-over-nodes comparisons with the Euclidean half-space,
// sampled along a radius schedule and summarized by log-log slopes.

#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "qlmass/convergence.hpp"
#include "qlmass/curvature_frames.hpp"
#include "qlmass/metric_models.hpp"
#include "qlmass/quadrature.hpp"

namespace qlmass {

enum class DecayQuantity {
  kMetricDeviation,     // |g - delta|
  kFirstDerivatives,    // |dg|
  kSecondDerivatives,   // |d^2 g|
  kMeasureRatio,        // |dsigma / dsigma_e - 1|
  kSurfaceNormal,       // |nu - nu_e|
  kEdgeConormal,        // |vartheta - vartheta_e| on the equator
  kBoundaryNormal,      // |mu + d_1| on the equator
  kBoundaryA,           // |A_ab| of dM on the equator
  kBoundaryH,           // |H| of dM on the equator
  kPositionNormal,      // |X - r nu| on the hemisphere
  kPositionConormal,    // |X - r vartheta| on the equator
  kArealRadius,         // |(2 A / omega)^{1/(n-1)} / r - 1|
  kTheta,               // |Theta|
  kRicciLinearization,  // |2 Rc - (g_ki,kj + g_kj,ki - g_ij,kk - g_kk,ij)|
  kContactCosine,       // |<vartheta, mu'>|
};

struct DecayInfo {
  DecayQuantity quantity;
  const char* name;
  /// Expected exponent as a + b tau.
  double offset;
  double tau_factor;
};

inline const std::vector<DecayInfo>& decay_quantities() {
  static const std::vector<DecayInfo> kInfo = {
      {DecayQuantity::kMetricDeviation, "metric-deviation", 0.0, -1.0},
      {DecayQuantity::kFirstDerivatives, "first-derivatives", -1.0, -1.0},
      {DecayQuantity::kSecondDerivatives, "second-derivatives", -2.0, -1.0},
      {DecayQuantity::kMeasureRatio, "measure-ratio", 0.0, -1.0},
      {DecayQuantity::kSurfaceNormal, "surface-normal", 0.0, -1.0},
      {DecayQuantity::kEdgeConormal, "edge-conormal", 0.0, -1.0},
      {DecayQuantity::kBoundaryNormal, "boundary-normal", 0.0, -1.0},
      {DecayQuantity::kBoundaryA, "boundary-second-form", -1.0, -1.0},
      {DecayQuantity::kBoundaryH, "boundary-mean-curvature", -1.0, -1.0},
      {DecayQuantity::kPositionNormal, "position-vs-normal", 1.0, -1.0},
      {DecayQuantity::kPositionConormal, "position-vs-conormal", 1.0, -1.0},
      {DecayQuantity::kArealRadius, "areal-radius", 0.0, -1.0},
      {DecayQuantity::kTheta, "theta", 0.0, -1.0},
      {DecayQuantity::kRicciLinearization, "ricci-linearization", -2.0, -2.0},
      {DecayQuantity::kContactCosine, "contact-cosine", 0.0, -1.0},
  };
  return kInfo;
}

inline const DecayInfo& decay_info(DecayQuantity q) {
  for (const auto& i : decay_quantities())
    if (i.quantity == q) return i;
  throw ParameterError("unknown decay quantity");
}

/// Value of a decay quantity at radius r (maximum over quadrature nodes).
template <int N>
double decay_sample(const MetricField<N>& field, DecayQuantity q, double r, int order = 16) {
  const double omega = unit_sphere_volume(N - 1);
  double worst = 0.0;
  auto over_hemisphere = [&](auto&& f) {
    for (const auto& x : hemisphere_rule<N>(r, order, field.boundary_layer()).nodes) worst = std::max(worst, f(x));
  };
  auto over_equator = [&](auto&& f) {
    for (const auto& x : equator_rule<N>(r, order).nodes) worst = std::max(worst, f(x));
  };
  switch (q) {
    case DecayQuantity::kMetricDeviation:
      over_hemisphere([&](const Vec<N>& x) { return (field.metric(x) - Mat<N>::Identity()).norm(); });
      break;
    case DecayQuantity::kFirstDerivatives:
      over_hemisphere([&](const Vec<N>& x) {
        const auto jet = eval_jet(field, x);
        double s = 0.0;
        for (const auto& m : jet.dg) s += m.squaredNorm();
        return std::sqrt(s);
      });
      break;
    case DecayQuantity::kSecondDerivatives:
      over_hemisphere([&](const Vec<N>& x) {
        const auto jet = eval_jet(field, x);
        double s = 0.0;
        for (const auto& row : jet.d2g)
          for (const auto& m : row) s += m.squaredNorm();
        return std::sqrt(s);
      });
      break;
    case DecayQuantity::kMeasureRatio:
      over_hemisphere([&](const Vec<N>& x) {
        return std::abs(measure_ratio<N>(field.metric(x), Domain::kHemisphere, x) - 1.0);
      });
      break;
    case DecayQuantity::kSurfaceNormal:
      over_hemisphere([&](const Vec<N>& x) { return (surface_frame(field, x).nu - x / r).norm(); });
      break;
    case DecayQuantity::kPositionNormal:
      over_hemisphere([&](const Vec<N>& x) { return (x - r * surface_frame(field, x).nu).norm(); });
      break;
    case DecayQuantity::kEdgeConormal:
      over_equator([&](const Vec<N>& x) { return (edge_frame(field, x).vartheta - x / r).norm(); });
      break;
    case DecayQuantity::kPositionConormal:
      over_equator([&](const Vec<N>& x) { return (x - r * edge_frame(field, x).vartheta).norm(); });
      break;
    case DecayQuantity::kBoundaryNormal:
      over_equator([&](const Vec<N>& x) { return (boundary_frame(field, x).mu + Vec<N>::Unit(0)).norm(); });
      break;
    case DecayQuantity::kBoundaryA:
      over_equator([&](const Vec<N>& x) { return boundary_frame(field, x).A.norm(); });
      break;
    case DecayQuantity::kBoundaryH:
      over_equator([&](const Vec<N>& x) { return std::abs(boundary_frame(field, x).H); });
      break;
    case DecayQuantity::kContactCosine:
      over_equator([&](const Vec<N>& x) { return std::abs(edge_frame(field, x).contact_cosine); });
      break;
    case DecayQuantity::kRicciLinearization:
      over_hemisphere([&](const Vec<N>& x) {
        const auto jet = eval_jet(field, x);
        return 2.0 * (curvature(jet).ricci - linearized_ricci(jet)).norm();
      });
      break;
    case DecayQuantity::kArealRadius:
      worst = std::abs(std::pow(2.0 * area(field, r, order).area / omega, 1.0 / (N - 1)) / r - 1.0);
      break;
    case DecayQuantity::kTheta:
      worst = std::abs(area(field, r, order).theta);
      break;
  }
  return worst;
}

struct DecaySeries {
  DecayQuantity quantity;
  std::string name;
  double expected = 0.0;
  double slope = 0.0;
  double rms = 0.0;
  /// True when every sample is at roundoff level; no slope is fitted.
  bool identically_zero = false;
  std::vector<double> radii;
  std::vector<double> values;

  bool within(double tol) const { return identically_zero || std::abs(slope - expected) <= tol; }
};

template <int N>
DecaySeries decay_series(const MetricField<N>& field, DecayQuantity q, const std::vector<double>& radii,
                         int order = 16, double zero_level = 1e-13) {
  const DecayInfo& info = decay_info(q);
  DecaySeries s;
  s.quantity = q;
  s.name = info.name;
  s.expected = info.offset + info.tau_factor * field.decay_rate();
  s.radii = radii;
  bool all_zero = true;
  for (double r : radii) {
    const double v = decay_sample(field, q, r, order);
    s.values.push_back(v);
    if (v > zero_level * std::max(1.0, r)) all_zero = false;
  }
  s.identically_zero = all_zero;
  if (!all_zero) std::tie(s.slope, s.rms) = loglog_slope(s.radii, s.values);
  return s;
}

/// Intrinsic scalar curvature of the hemisphere from the Gauss equation,
/// H^2 - |A|^2 - 2 G(nu, nu), at x.
template <int N>
double gauss_scalar_curvature(const MetricField<N>& field, const Vec<N>& x) {
  const CurvaturePack<N> c = curvature(field, x);
  const SurfaceFrame<N> s = surface_frame(c, x);
  return s.H * s.H - s.A_norm_sq - 2.0 * s.nu.dot(c.einstein * s.nu);
}

}  // namespace qlmass
