#pragma once

// Invariant suites run by `qlmass validate`.

#include <cmath>
#include <initializer_list>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "qlmass/diagnostics.hpp"
#include "qlmass/harness.hpp"
#include "qlmass/mass_functionals.hpp"

namespace qlmass {

struct CheckResult {
  std::string suite;
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

/// Default tolerances; every key can be overridden from the config.
inline std::map<std::string, double> default_tolerances() {
  return {
      {"zero", 1e-8},           {"exact", 1e-8},      {"flux_tensor_100", 0.02}, {"flux_tensor_1000", 0.002},
      {"hawking_forms", 1e-6},  {"bianchi", 1e-4},    {"slope", 0.2},            {"graph", 1e-10},
      {"symmetry", 1e-12},      {"graph_tensor", 0.05},
  };
}

namespace detail {

class Checks {
 public:
  Checks(std::string suite, const std::map<std::string, double>& overrides) : suite_(std::move(suite)) {
    tol_ = default_tolerances();
    for (const auto& [k, v] : overrides) {
      if (!tol_.count(k)) throw ParameterError("tolerances: unknown key '" + k + "'");
      tol_[k] = v;
    }
  }
  double tol(const std::string& key) const { return tol_.at(key); }

  /// Records |value| <= tolerance.
  void bound(const std::string& name, double value, const std::string& key, std::string detail = "") {
    const double t = tol(key);
    out.push_back({suite_, name, value, t, std::abs(value) <= t, std::move(detail)});
  }
  void slope(const DecaySeries& s) {
    if (s.identically_zero) {
      out.push_back({suite_, "decay/" + s.name, 0.0, tol("slope"), true, "identically zero"});
      return;
    }
    bound("decay/" + s.name, s.slope - s.expected, "slope",
          fmt::format("slope {:.4f} expected {:.4g}", s.slope, s.expected));
  }
  std::vector<CheckResult> out;

 private:
  std::string suite_;
  std::map<std::string, double> tol_;
};

inline std::string r_tag(double r) { return " r=" + format_double(r); }

}  // namespace detail

template <int N>
std::vector<CheckResult> validate_metric(const MetricSpec& spec, const std::map<std::string, double>& tolerances,
                                         int order = 0) {
  const MetricField<N> field = make_metric<N>(spec);
  const int q = order > 0 ? order : RunConfig::default_order(N);
  detail::Checks c(spec.family, tolerances);
  const std::vector<double> decay_radii{25, 50, 100, 200, 400};
  auto slopes = [&](std::initializer_list<DecayQuantity> qs) {
    for (DecayQuantity dq : qs) c.slope(decay_series(field, dq, decay_radii));
  };
  const std::initializer_list<DecayQuantity> boundary = {DecayQuantity::kBoundaryNormal, DecayQuantity::kBoundaryA,
                                    DecayQuantity::kBoundaryH, DecayQuantity::kEdgeConormal};
  const std::initializer_list<DecayQuantity> bulk = {DecayQuantity::kMetricDeviation,  DecayQuantity::kFirstDerivatives,
                     DecayQuantity::kSecondDerivatives, DecayQuantity::kMeasureRatio,
                     DecayQuantity::kSurfaceNormal,     DecayQuantity::kPositionNormal,
                     DecayQuantity::kPositionConormal,  DecayQuantity::kArealRadius,
                     DecayQuantity::kTheta,             DecayQuantity::kRicciLinearization};

  if (spec.family == "flat") {
    for (double r : {10.0, 100.0}) {
      c.bound("adm-flux" + detail::r_tag(r), adm_flux(field, r, q).value, "zero");
      c.bound("adm-tensor" + detail::r_tag(r), adm_tensor(field, r, q).value, "zero");
      c.bound("hawking-general" + detail::r_tag(r), hawking_general(field, r, q).value, "zero");
      if constexpr (N == 3) {
        c.bound("hawking-disk" + detail::r_tag(r), hawking_disk(field, r, q).value, "zero");
        c.bound("iso-mass" + detail::r_tag(r), iso_mass(field, r, q).value, "zero");
      }
      c.bound("bianchi" + detail::r_tag(r), bianchi_check(field, r, q).residual, "zero");
    }
    const double r = 5.0;
    Vec<N> x = Vec<N>::Zero();
    x[0] = 3.0;
    x[1] = 4.0;
    c.bound("gauss-equation r=5", gauss_scalar_curvature(field, x) - (N - 1.0) * (N - 2.0) / (r * r), "exact");
  } else if (spec.family == "half-schwarzschild") {
    const double m = spec.param("m", 1.0);
    for (double r : {2.0, 10.0, 100.0}) {
      const double phi = 1.0 + 0.5 * m / std::pow(r, N - 2);
      const double exact = m * std::pow(phi, (6.0 - N) / (N - 2.0));
      c.bound("adm-flux closed form" + detail::r_tag(r), adm_flux(field, r, q).value - exact, "exact");
      const double hg = hawking_general(field, r, q).value;
      if constexpr (N == 3) {
        const double hd = hawking_disk(field, r, q).value;
        c.bound("hawking-disk exact" + detail::r_tag(r), hd - m, "exact");
        c.bound("hawking forms agree" + detail::r_tag(r), hg - hd, "hawking_forms");
      } else {
        c.bound("hawking-general exact" + detail::r_tag(r), hg - m, "hawking_forms");
      }
    }
    if constexpr (N == 3) {
      c.bound("flux-tensor r=100", adm_tensor(field, 100, q).value - adm_flux(field, 100, q).value,
              "flux_tensor_100");
      c.bound("flux-tensor r=1000", adm_tensor(field, 1000, q).value - adm_flux(field, 1000, q).value,
              "flux_tensor_1000");
    }
    const double inner = std::max(kVolumeBaseRadius, 2.0 * field.family_core_radius());
    const BianchiResult b = bianchi_check(field, 20.0, q, inner);
    c.bound("bianchi annulus [" + format_double(inner) + ",20]", b.relative_residual, "bianchi");
    c.bound("contact cosine r=10", max_contact_cosine(field, 10.0, q), "symmetry");
    slopes(boundary);
    slopes(bulk);
  } else if (spec.family == "conformal") {
    for (double r : {100.0, 1000.0}) {
      c.bound("flux-tensor" + detail::r_tag(r), adm_tensor(field, r, q).value - adm_flux(field, r, q).value,
              r < 500 ? "flux_tensor_100" : "flux_tensor_1000");
    }
    const BianchiResult b = bianchi_check(field, 20.0, q);
    c.bound("bianchi r=20", b.relative_residual, "bianchi");
    slopes(boundary);
    slopes(bulk);
  } else if (spec.family == "graph") {
    const auto gs = make_graph_spec<N - 1>(spec);
    if constexpr (N == 4) {
      for (double rho : {10.0, 100.0, 200.0}) {
        c.bound("graph-mass closed form" + detail::r_tag(rho),
                graph_mass(gs, rho, q) + 8.0 * std::numbers::pi * gs.amplitude, "graph");
      }
    }
    // The tensor form carries the constant c_n; the graph formula does not.
    const double rho = 200.0;
    const double gm = graph_mass(gs, rho, q);
    const double t = adm_tensor(field, rho, q).value / tensor_constant(N);
    c.bound("tensor / c_n vs graph-mass r=200", gm != 0.0 ? (t - gm) / gm : t, "graph_tensor");
    slopes({DecayQuantity::kBoundaryA, DecayQuantity::kBoundaryNormal, DecayQuantity::kContactCosine});
  }
  return c.out;
}

inline std::vector<CheckResult> validate(const MetricSpec& spec, const std::map<std::string, double>& tolerances,
                                         int order = 0) {
  return with_dimension(manifold_dimension(spec), [&](auto dim) {
    return validate_metric<decltype(dim)::value>(spec, tolerances, order);
  });
}

}  // namespace qlmass
