#pragma once

// Mass functionals on coordinate hemispheres, the graph-boundary formula and
// the integrated Bianchi closure test.
//
// Normalizations use the full-sphere volume omega = |S^{n-1}|:
//   adm-flux         b_n    = 1 / ((n-1) omega)
//   adm-tensor       c_n    = 2 / ((n-2)(n-1) omega)
//   hawking-general  c_n^H  = 1 / ((n-2)(n-1) omega), with (2 A / omega)^{1/(n-1)}
// so that half-Schwarzschild with parameter m has mass m in every form.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qlmass/common.hpp"
#include "qlmass/curvature_frames.hpp"
#include "qlmass/metric_models.hpp"
#include "qlmass/quadrature.hpp"

namespace qlmass {

enum class Functional { kAdmFlux, kAdmTensor, kHawkingDisk, kHawkingGeneral, kIsoMass, kBianchi };

inline const std::vector<std::pair<Functional, std::string>>& functional_names() {
  static const std::vector<std::pair<Functional, std::string>> kNames = {
      {Functional::kAdmFlux, "adm-flux"},         {Functional::kAdmTensor, "adm-tensor"},
      {Functional::kHawkingDisk, "hawking-disk"}, {Functional::kHawkingGeneral, "hawking-general"},
      {Functional::kIsoMass, "iso-mass"},         {Functional::kBianchi, "bianchi"},
  };
  return kNames;
}

inline std::string functional_name(Functional f) {
  for (const auto& [tag, name] : functional_names())
    if (tag == f) return name;
  return "?";
}

inline Functional parse_functional(const std::string& name) {
  for (const auto& [tag, n] : functional_names())
    if (n == name) return tag;
  throw ParameterError("unknown functional '" + name + "'");
}

struct MassReport {
  Functional functional = Functional::kAdmFlux;
  double r = 0.0;
  double value = 0.0;
  /// Metric area of the hemisphere; NaN when not computed.
  double area = std::numeric_limits<double>::quiet_NaN();
  /// V(r) including the base constant; NaN when not computed.
  double volume = std::numeric_limits<double>::quiet_NaN();
  double theta = std::numeric_limits<double>::quiet_NaN();
  int order = 0;
  /// Constant multiplying the bracketed integrals.
  double normalization = 1.0;
  std::optional<int> euler_characteristic;
  std::vector<std::string> warnings;
};

inline double flux_constant(int n) { return 1.0 / ((n - 1) * unit_sphere_volume(n - 1)); }
inline double tensor_constant(int n) { return 2.0 / ((n - 2.0) * (n - 1) * unit_sphere_volume(n - 1)); }
inline double hawking_constant(int n) { return 1.0 / ((n - 2.0) * (n - 1) * unit_sphere_volume(n - 1)); }

/// Base radius and flat base volume used by iso_mass.
inline constexpr double kVolumeBaseRadius = 2.0;

namespace detail {

inline void check_mass_radius(double r) {
  if (!(r > 1.0) || !std::isfinite(r)) throw ParameterError("mass functionals need r > 1");
}

inline void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw GeometryError(std::string(what) + ": non-finite result");
}

}  // namespace detail

/// b_n [ int_S (g_ij,j - g_jj,i) nu_e^i dsigma_e + int_dS g_a1 x^a / r dtheta_e ]
/// with Euclidean normals and measures.
template <int N>
MassReport adm_flux(const MetricField<N>& field, double r, int order) {
  detail::check_mass_radius(r);
  const auto hemi = hemisphere_rule<N>(r, order, field.boundary_layer());
  CompensatedSum bulk;
  for (std::size_t k = 0; k < hemi.size(); ++k) {
    const Vec<N>& x = hemi.nodes[k];
    const MetricJet<N> jet = eval_jet(field, x);
    const Vec<N> nu = x / r;
    double f = 0.0;
    for (int i = 0; i < N; ++i) {
      double t = 0.0;
      for (int j = 0; j < N; ++j) t += jet.dg[j](i, j) - jet.dg[i](j, j);
      f += t * nu[i];
    }
    if (!std::isfinite(f)) detail::throw_non_finite<N>(x, hemi.domain);
    bulk += hemi.weights[k] * f;
  }
  const auto edge = equator_rule<N>(r, order);
  CompensatedSum rim;
  for (std::size_t k = 0; k < edge.size(); ++k) {
    const Vec<N>& x = edge.nodes[k];
    const Mat<N> g = field.metric(x);
    double f = 0.0;
    for (int a = 1; a < N; ++a) f += g(a, 0) * x[a] / r;
    rim += edge.weights[k] * f;
  }
  MassReport rep;
  rep.functional = Functional::kAdmFlux;
  rep.r = r;
  rep.order = order;
  rep.normalization = flux_constant(N);
  rep.value = rep.normalization * (bulk.value() + rim.value());
  detail::check_finite(rep.value, "adm-flux");
  return rep;
}

/// Parts of -c [ int_S G(X, nu) dsigma + int_dS (A - H g)(X, vartheta) dtheta ].
struct TensorIntegrals {
  double surface = 0.0;
  double edge = 0.0;
};

template <int N>
TensorIntegrals tensor_integrals(const MetricField<N>& field, double r, int order) {
  const auto hemi = hemisphere_rule<N>(r, order, field.boundary_layer());
  CompensatedSum surf;
  for (std::size_t k = 0; k < hemi.size(); ++k) {
    const Vec<N>& x = hemi.nodes[k];
    const CurvaturePack<N> c = curvature(field, x);
    const SurfaceFrame<N> s = surface_frame(c, x);
    const double f = x.dot(c.einstein * s.nu) * s.measure_ratio;
    if (!std::isfinite(f)) detail::throw_non_finite<N>(x, hemi.domain);
    surf += hemi.weights[k] * f;
  }
  const auto eq = equator_rule<N>(r, order);
  CompensatedSum rim;
  for (std::size_t k = 0; k < eq.size(); ++k) {
    const Vec<N>& x = eq.nodes[k];
    const CurvaturePack<N> c = curvature(field, x);
    const BoundaryFrame<N> b = boundary_frame(c, x);
    const EdgeFrame<N> e = edge_frame(c, x);
    const double f = (x.dot(b.A_ambient * e.vartheta) - b.H * x.dot(c.g * e.vartheta)) * e.measure_ratio;
    if (!std::isfinite(f)) detail::throw_non_finite<N>(x, eq.domain);
    rim += eq.weights[k] * f;
  }
  return {surf.value(), rim.value()};
}

template <int N>
MassReport adm_tensor(const MetricField<N>& field, double r, int order) {
  detail::check_mass_radius(r);
  const TensorIntegrals t = tensor_integrals(field, r, order);
  MassReport rep;
  rep.functional = Functional::kAdmTensor;
  rep.r = r;
  rep.order = order;
  rep.normalization = tensor_constant(N);
  rep.value = -rep.normalization * (t.surface + t.edge);
  detail::check_finite(rep.value, "adm-tensor");
  return rep;
}

/// Largest |<vartheta, mu'>| over the equator nodes.
template <int N>
double max_contact_cosine(const MetricField<N>& field, double r, int order) {
  const auto eq = equator_rule<N>(r, order);
  double worst = 0.0;
  for (const auto& x : eq.nodes) worst = std::max(worst, std::abs(edge_frame(field, x).contact_cosine));
  return worst;
}

/// (|S| / 8 pi)^{1/2} (1 - (1/8 pi) int_S H^2), n = 3.
template <int N>
MassReport hawking_disk(const MetricField<N>& field, double r, int order, double contact_threshold = 1e-3) {
  if constexpr (N != 3) {
    throw ParameterError("hawking-disk is defined for n = 3 only");
  } else {
    detail::check_mass_radius(r);
    const auto hemi = hemisphere_rule<N>(r, order, field.boundary_layer());
    CompensatedSum area_sum, h2_sum;
    for (std::size_t k = 0; k < hemi.size(); ++k) {
      const Vec<N>& x = hemi.nodes[k];
      const SurfaceFrame<N> s = surface_frame(field, x);
      const double dA = hemi.weights[k] * s.measure_ratio;
      if (!std::isfinite(dA * s.H)) detail::throw_non_finite<N>(x, hemi.domain);
      area_sum += dA;
      h2_sum += dA * s.H * s.H;
    }
    const double A = area_sum.value();
    const double pi = std::numbers::pi;
    MassReport rep;
    rep.functional = Functional::kHawkingDisk;
    rep.r = r;
    rep.order = order;
    rep.area = A;
    rep.normalization = 1.0 / std::sqrt(8.0 * pi);
    rep.euler_characteristic = 1;
    rep.value = std::sqrt(A / (8.0 * pi)) * (1.0 - h2_sum.value() / (8.0 * pi));
    const double contact = max_contact_cosine(field, r, order);
    if (contact > contact_threshold) {
      rep.warnings.push_back("non-orthogonal intersection: max |<vartheta,mu'>| = " +
                             detail::format_number(contact));
    }
    detail::check_finite(rep.value, "hawking-disk");
    return rep;
  }
}

/// c^H (2 A / omega)^{1/(n-1)} [ int_S (S - (n-2)/(n-1) H^2) dsigma
///   + 2 int_dS (H_{dS,S} + <vartheta, mu'> H_{dS,dM}) dtheta ]
/// with the intrinsic scalar curvature S = H^2 - |A|^2 - 2 G(nu, nu).
template <int N>
MassReport hawking_general(const MetricField<N>& field, double r, int order) {
  detail::check_mass_radius(r);
  const auto hemi = hemisphere_rule<N>(r, order, field.boundary_layer());
  CompensatedSum area_sum, bulk;
  const double k = (N - 2.0) / (N - 1.0);
  for (std::size_t i = 0; i < hemi.size(); ++i) {
    const Vec<N>& x = hemi.nodes[i];
    const CurvaturePack<N> c = curvature(field, x);
    const SurfaceFrame<N> s = surface_frame(c, x);
    const double intrinsic = s.H * s.H - s.A_norm_sq - 2.0 * s.nu.dot(c.einstein * s.nu);
    const double dA = hemi.weights[i] * s.measure_ratio;
    const double f = dA * (intrinsic - k * s.H * s.H);
    if (!std::isfinite(f)) detail::throw_non_finite<N>(x, hemi.domain);
    area_sum += dA;
    bulk += f;
  }
  const auto eq = equator_rule<N>(r, order);
  CompensatedSum rim;
  for (std::size_t i = 0; i < eq.size(); ++i) {
    const EdgeFrame<N> e = edge_frame(field, eq.nodes[i]);
    rim += eq.weights[i] * e.measure_ratio * (e.H_edge_in_surface + e.contact_cosine * e.H_edge_in_boundary);
  }
  const double omega = unit_sphere_volume(N - 1);
  const double A = area_sum.value();
  MassReport rep;
  rep.functional = Functional::kHawkingGeneral;
  rep.r = r;
  rep.order = order;
  rep.area = A;
  rep.normalization = hawking_constant(N);
  rep.value = rep.normalization * std::pow(2.0 * A / omega, 1.0 / (N - 1)) * (bulk.value() + 2.0 * rim.value());
  detail::check_finite(rep.value, "hawking-general");
  return rep;
}

/// (2 / A) (V - sqrt(2) A^{3/2} / (6 sqrt(pi))), n = 3, with
/// V(r) = |flat half ball of radius r0| + base_offset + int_{r0}^{r} V'(s) ds.
template <int N>
MassReport iso_mass(const MetricField<N>& field, double r, int order, double r0 = kVolumeBaseRadius,
                    double base_offset = 0.0) {
  if constexpr (N != 3) {
    throw ParameterError("iso-mass is defined for n = 3 only");
  } else {
    detail::check_mass_radius(r);
    if (!(r > r0)) throw ParameterError("iso-mass needs r > r0 = " + detail::format_number(r0));
    const AreaResult a = area(field, r, order);
    const double V = euclidean_half_ball_volume(3, r0) + base_offset + volume(field, r0, r, order);
    const double pi = std::numbers::pi;
    MassReport rep;
    rep.functional = Functional::kIsoMass;
    rep.r = r;
    rep.order = order;
    rep.area = a.area;
    rep.theta = a.theta;
    rep.volume = V;
    rep.normalization = 2.0;
    rep.value = 2.0 / a.area * (V - std::sqrt(2.0) * std::pow(a.area, 1.5) / (6.0 * std::sqrt(pi)));
    detail::check_finite(rep.value, "iso-mass");
    return rep;
  }
}

/// (n-1) int_{|X| = rho} d_rho u dtheta_e over the base R^n.
template <int Base>
double graph_mass(const GraphSpec<Base>& spec, double rho, int order) {
  if (!(rho > 0.0)) throw ParameterError("graph_mass needs rho > 0");
  // The equator of R^{Base+1} is the sphere |X| = rho of the base.
  const auto eq = equator_rule<Base + 1>(rho, order);
  CompensatedSum sum;
  for (std::size_t k = 0; k < eq.size(); ++k) {
    std::array<double, Base> X;
    for (int a = 0; a < Base; ++a) X[a] = eq.nodes[k][a + 1];
    const auto du = spec.profile_gradient(X);
    double radial = 0.0;
    for (int a = 0; a < Base; ++a) radial += du[a] * X[a] / rho;
    sum += eq.weights[k] * radial;
  }
  return (Base - 1) * sum.value();
}

// ---------------------------------------------------------------------------
// Integrated Bianchi identity for X = x^i d_i

struct BianchiResult {
  double surface = 0.0;        // int_S G(X, nu) dsigma (outer minus inner)
  double edge = 0.0;           // int_dPi (A - H g)(X, vartheta) dtheta (outer minus inner)
  double volume = 0.0;         // -(n-2)/(2n) int_D R div X dV
  double disk = 0.0;           // -(n-2)/(n-1) int_Pi H div_Pi X dA
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  /// |residual| / max(|terms|, 1e-6).
  double relative_residual = 0.0;
  /// Largest relative conformal-Killing defect of X in g and in h.
  double killing_residual = 0.0;
};

namespace detail {

/// |L_X g - (2/n) div X g| / |g| and div X at x.
template <int N>
std::pair<double, double> killing_defect(const MetricJet<N>& jet, const Mat<N>& ginv) {
  Mat<N> xdg = Mat<N>::Zero();
  for (int k = 0; k < N; ++k) xdg += jet.x[k] * jet.dg[k];
  const Mat<N> lie = xdg + 2.0 * jet.g;
  const double div = N + 0.5 * ginv.cwiseProduct(xdg).sum();
  const double defect = (lie - (2.0 / N) * div * jet.g).norm() / jet.g.norm();
  return {defect, div};
}

}  // namespace detail

/// Evaluates both sides on D = {r_in <= |x| <= r, x1 >= 0}; r_in = 0 gives the
/// half ball. Throws GeometryError when X is not conformal Killing (relative
/// defect above killing_tol), since the identity does not apply then.
template <int N>
BianchiResult bianchi_check(const MetricField<N>& field, double r, int order, double r_in = 0.0,
                            double killing_tol = 1e-6) {
  if (!(r > 0.0) || !(r_in >= 0.0 && r_in < r)) throw ParameterError("bianchi_check: need 0 <= r_in < r");
  BianchiResult out;
  double killing = 0.0;
  auto note_killing = [&](double d) {
    killing = std::max(killing, d);
    if (!(killing <= killing_tol)) {
      throw GeometryError("bianchi_check: X = x^i d_i is not conformal Killing for this metric (defect " +
                          detail::format_number(killing) + ")");
    }
  };

  auto hemisphere_term = [&](double radius) {
    const auto hemi = hemisphere_rule<N>(radius, order, field.boundary_layer());
    CompensatedSum s;
    for (std::size_t k = 0; k < hemi.size(); ++k) {
      const Vec<N>& x = hemi.nodes[k];
      const CurvaturePack<N> c = curvature(field, x);
      const SurfaceFrame<N> f = surface_frame(c, x);
      s += hemi.weights[k] * f.measure_ratio * x.dot(c.einstein * f.nu);
    }
    return s.value();
  };
  auto rim_term = [&](double radius) {
    const auto eq = equator_rule<N>(radius, order);
    CompensatedSum s;
    for (std::size_t k = 0; k < eq.size(); ++k) {
      const Vec<N>& x = eq.nodes[k];
      const CurvaturePack<N> c = curvature(field, x);
      const BoundaryFrame<N> b = boundary_frame(c, x);
      const EdgeFrame<N> e = edge_frame(c, x);
      s += eq.weights[k] * e.measure_ratio *
           (x.dot(b.A_ambient * e.vartheta) - b.H * x.dot(c.g * e.vartheta));
    }
    return s.value();
  };

  out.surface = hemisphere_term(r);
  out.edge = rim_term(r);
  if (r_in > 0.0) {
    // Inner boundary pieces carry the normal pointing into D.
    out.surface -= hemisphere_term(r_in);
    out.edge -= rim_term(r_in);
  }

  {
    const auto shell = half_ball_shell_rule<N>(r_in, r, order);
    CompensatedSum s;
    for (std::size_t k = 0; k < shell.size(); ++k) {
      const Vec<N>& x = shell.nodes[k];
      const MetricJet<N> jet = eval_jet(field, x);
      const CurvaturePack<N> c = curvature(jet);
      const auto [defect, div] = detail::killing_defect(jet, c.ginv);
      note_killing(defect);
      s += shell.weights[k] * std::sqrt(c.g.determinant()) * c.scalar * div;
    }
    out.volume = -(N - 2.0) / (2.0 * N) * s.value();
  }
  {
    const auto disk = boundary_disk_rule<N>(r_in, r, order);
    CompensatedSum s;
    for (std::size_t k = 0; k < disk.size(); ++k) {
      const Vec<N>& x = disk.nodes[k];
      const MetricJet<N> jet = eval_jet(field, x);
      const CurvaturePack<N> c = curvature(jet);
      const BoundaryFrame<N> b = boundary_frame(c, x);
      // Intrinsic data of h on the boundary.
      using Sub = Eigen::Matrix<double, N - 1, N - 1>;
      Sub xdh = Sub::Zero();
      for (int a = 1; a < N; ++a) xdh += x[a] * jet.dg[a].template bottomRightCorner<N - 1, N - 1>();
      const Sub hinv = b.h.inverse();
      const double div = (N - 1) + 0.5 * hinv.cwiseProduct(xdh).sum();
      const Sub lie = xdh + 2.0 * b.h;
      note_killing((lie - (2.0 / (N - 1)) * div * b.h).norm() / b.h.norm());
      s += disk.weights[k] * std::sqrt(b.h.determinant()) * b.H * div;
    }
    out.disk = -(N - 2.0) / (N - 1.0) * s.value();
  }

  out.lhs = out.surface + out.edge;
  out.rhs = out.volume + out.disk;
  out.residual = out.lhs - out.rhs;
  const double scale =
      std::max({std::abs(out.surface), std::abs(out.edge), std::abs(out.volume), std::abs(out.disk), 1e-6});
  out.relative_residual = std::abs(out.residual) / scale;
  out.killing_residual = killing;
  return out;
}

}  // namespace qlmass
