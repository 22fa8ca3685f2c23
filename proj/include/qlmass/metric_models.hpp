#pragma once

// Model metrics on the coordinate half-space {x1 >= 0} (index 0 in code).
//
// Every family writes its components once as a generic expression over a
// scalar type S. Instantiating with double gives g_ij(x); instantiating with
// Taylor2<N> gives exact first and second derivatives. The finite-difference
// jet is kept as an independent route for cross-checks and as a run option.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qlmass/common.hpp"
#include "qlmass/taylor.hpp"

namespace qlmass {

template <int N>
using Point = std::array<double, N>;

template <class S, int N>
using Components = std::array<S, N * N>;

namespace detail {

template <class S, int N>
S squared_norm(const std::array<S, N>& x) {
  S r2(0.0);
  for (int i = 0; i < N; ++i) r2 += x[i] * x[i];
  return r2;
}

template <class S, int N>
Components<S, N> conformal_components(const S& factor) {
  Components<S, N> g;
  g.fill(S(0.0));
  for (int i = 0; i < N; ++i) g[i * N + i] = factor;
  return g;
}

inline std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace detail

/// Euclidean metric on R^n_+.
template <int N>
struct FlatHalfSpace {
  static constexpr const char* kName = "flat";

  double decay_rate() const { return N - 2.0; }
  double core_radius() const { return 0.0; }
  double boundary_layer() const { return 0.0; }
  bool radially_conformal() const { return true; }
  std::string params() const { return "n=" + std::to_string(N); }

  template <class S>
  Components<S, N> components(const std::array<S, N>&) const {
    return detail::conformal_components<S, N>(S(1.0));
  }
};

/// Spatial Schwarzschild in isotropic coordinates, restricted to x1 >= 0:
/// g = (1 + m / (2 r^{n-2}))^{4/(n-2)} delta.
template <int N>
struct HalfSchwarzschild {
  static constexpr const char* kName = "half-schwarzschild";
  double mass = 1.0;

  explicit HalfSchwarzschild(double m) : mass(m) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw ParameterError("half-schwarzschild: mass parameter m must be positive");
    }
  }

  double decay_rate() const { return N - 2.0; }
  /// Horizon radius (m/2)^{1/(n-2)}; points at or inside it are rejected.
  double core_radius() const { return std::pow(0.5 * mass, 1.0 / (N - 2)); }
  double boundary_layer() const { return 0.0; }
  bool radially_conformal() const { return true; }
  std::string params() const {
    return "n=" + std::to_string(N) + ";m=" + detail::format_number(mass);
  }

  template <class S>
  Components<S, N> components(const std::array<S, N>& x) const {
    using std::pow;
    const S r2 = detail::squared_norm<S, N>(x);
    const S phi = 1.0 + (0.5 * mass) / pow(r2, 0.5 * (N - 2));
    return detail::conformal_components<S, N>(pow(phi, 4.0 / (N - 2)));
  }
};

/// g = psi(r) delta with psi = 1 + a (1 + r^2)^{-tau/2}; smooth at the origin.
template <int N>
struct ConformalPerturbation {
  static constexpr const char* kName = "conformal";
  double amplitude = 1.0;
  double tau = 1.0;

  ConformalPerturbation(double a, double decay) : amplitude(a), tau(decay) {
    if (!std::isfinite(a) || a <= -1.0) {
      throw ParameterError("conformal: amplitude a must exceed -1 (positivity of g at r = 0)");
    }
    if (!(decay > 0.5 * (N - 2))) {
      throw ParameterError("conformal: decay rate tau must exceed (n-2)/2");
    }
  }

  double decay_rate() const { return tau; }
  double core_radius() const { return 0.0; }
  double boundary_layer() const { return 0.0; }
  bool radially_conformal() const { return true; }
  std::string params() const {
    return "n=" + std::to_string(N) + ";a=" + detail::format_number(amplitude) +
           ";tau=" + detail::format_number(tau);
  }

  template <class S>
  Components<S, N> components(const std::array<S, N>& x) const {
    using std::pow;
    const S r2 = detail::squared_norm<S, N>(x);
    return detail::conformal_components<S, N>(1.0 + amplitude * pow(1.0 + r2, -0.5 * tau));
  }
};

/// Boundary profile u and vertical taper v for the graph construction over a
/// base R^n. The profile is a / |X| outside the unit ball, continued inside by
/// the even polynomial (35 - 35 s^2 + 21 s^4 - 5 s^6) / 16 which matches it to
/// third order at |X| = 1, plus an optional compactly supported bump.
template <int Base>
struct GraphSpec {
  double amplitude = 0.0;
  double bump_amplitude = 0.0;
  double bump_radius = 1.0;
  std::array<double, Base> bump_center{};

  static constexpr int base_dimension() { return Base; }

  /// u(X) for any scalar type.
  template <class S>
  S profile(const std::array<S, Base>& X) const {
    using std::sqrt;
    using std::pow;
    const S s2 = detail::squared_norm<S, Base>(X);
    S u(0.0);
    if (value_of(s2) >= 1.0) {
      u = amplitude / sqrt(s2);
    } else {
      u = amplitude * (35.0 - 35.0 * s2 + 21.0 * s2 * s2 - 5.0 * s2 * s2 * s2) / 16.0;
    }
    if (bump_amplitude != 0.0) {
      S d2(0.0);
      for (int a = 0; a < Base; ++a) {
        const S dx = X[a] - bump_center[a];
        d2 += dx * dx;
      }
      const double w2 = bump_radius * bump_radius;
      if (value_of(d2) < w2) {
        const S t = 1.0 - d2 / w2;
        u += bump_amplitude * (t * t) * (t * t);
      }
    }
    return u;
  }

  /// Du(X) for any scalar type, written out so that metric jets (which
  /// contain Du) stay exact to second order.
  template <class S>
  std::array<S, Base> profile_gradient(const std::array<S, Base>& X) const {
    using std::pow;
    const S s2 = detail::squared_norm<S, Base>(X);
    S radial(0.0);  // du = radial * X
    if (value_of(s2) >= 1.0) {
      radial = -amplitude * pow(s2, -1.5);
    } else {
      radial = amplitude * (-70.0 + 84.0 * s2 - 30.0 * s2 * s2) / 16.0;
    }
    std::array<S, Base> du;
    for (int a = 0; a < Base; ++a) du[a] = radial * X[a];
    if (bump_amplitude != 0.0) {
      S d2(0.0);
      for (int a = 0; a < Base; ++a) {
        const S dx = X[a] - bump_center[a];
        d2 += dx * dx;
      }
      const double w2 = bump_radius * bump_radius;
      if (value_of(d2) < w2) {
        const S t = 1.0 - d2 / w2;
        const S c = (-8.0 * bump_amplitude / w2) * (t * t * t);
        for (int a = 0; a < Base; ++a) du[a] += c * (X[a] - bump_center[a]);
      }
    }
    return du;
  }

  /// v(x0) = (1 + x0^2)^{(1-n)/2}, so v(0) = 1.
  template <class S>
  S taper(const S& x0) const {
    using std::pow;
    return pow(1.0 + x0 * x0, 0.5 * (1 - Base));
  }

  /// dv/dx0.
  template <class S>
  S taper_derivative(const S& x0) const {
    using std::pow;
    return (1.0 - Base) * x0 * pow(1.0 + x0 * x0, 0.5 * (-1 - Base));
  }

  /// sup |u| over the base, used for the positivity guard.
  double profile_bound() const {
    return std::abs(amplitude) * 35.0 / 16.0 + std::abs(bump_amplitude);
  }

  struct Derivatives {
    double value;
    std::array<double, Base> gradient;
    std::array<double, Base * Base> hessian;
  };

  Derivatives derivatives(const std::array<double, Base>& X) const {
    std::array<Taylor2<Base>, Base> vars;
    for (int a = 0; a < Base; ++a) vars[a] = Taylor2<Base>::variable(a, X[a]);
    const Taylor2<Base> u = profile(vars);
    return {u.v, u.d, u.h};
  }
};

/// Metric induced on R^{n+1}_+ by Psi(x0, X) = (x0 + v(x0) u(X), X), so that
/// the boundary {x0 = 0} maps onto the graph of u. The manifold dimension is
/// N = n + 1 and x0 is coordinate index 0.
template <int N>
struct GraphMetric {
  static constexpr const char* kName = "graph";
  GraphSpec<N - 1> spec;

  explicit GraphMetric(GraphSpec<N - 1> s) : spec(s) {
    // |v'| <= (n-1)/2 * 2 x/(1+x^2) <= (n-1)/2, so 1 + u v' > 0 is guaranteed
    // when sup|u| (n-1)/2 < 1.
    if (!std::isfinite(s.amplitude) || spec.profile_bound() * 0.5 * (N - 2) >= 1.0) {
      throw ParameterError("graph: profile too large, the map Psi would not be a diffeomorphism");
    }
    if (!(s.bump_radius > 0.0)) throw ParameterError("graph: bump_radius must be positive");
  }

  /// Rate along the boundary face, where v = 1 and v' = 0. Inside the layer
  /// x0 ~ 1 the term u v' only decays like r^{3-N}.
  double decay_rate() const { return N - 2.0; }
  double core_radius() const { return 0.0; }
  /// The taper v varies on the unit scale in x0.
  double boundary_layer() const { return 1.0; }
  bool radially_conformal() const { return false; }
  std::string params() const {
    std::string p = "n=" + std::to_string(N - 1) + ";a=" + detail::format_number(spec.amplitude);
    if (spec.bump_amplitude != 0.0) {
      p += ";bump_amplitude=" + detail::format_number(spec.bump_amplitude) +
           ";bump_radius=" + detail::format_number(spec.bump_radius);
    }
    return p;
  }

  template <class S>
  Components<S, N> components(const std::array<S, N>& x) const {
    std::array<S, N - 1> X;
    for (int a = 0; a < N - 1; ++a) X[a] = x[a + 1];
    const S u = spec.profile(X);
    const std::array<S, N - 1> du = spec.profile_gradient(X);
    const S v = spec.taper(x[0]);
    const S dv = spec.taper_derivative(x[0]);
    const S e0 = 1.0 + u * dv;  // coefficient of e_0 in d Psi / d x0
    Components<S, N> g;
    g[0] = e0 * e0;
    for (int a = 0; a < N - 1; ++a) {
      const S g0a = e0 * v * du[a];
      g[(a + 1)] = g0a;
      g[(a + 1) * N] = g0a;
      for (int b = 0; b < N - 1; ++b) {
        S gab = v * v * du[a] * du[b];
        if (a == b) gab += 1.0;
        g[(a + 1) * N + (b + 1)] = gab;
      }
    }
    return g;
  }
};

/// Compactly supported conformal bump added to any family:
/// g += amplitude * (1 - |x - c|^2 / w^2)^4 delta inside the ball |x - c| < w.
template <int N>
struct CompactBump {
  Point<N> center{};
  double radius = 1.0;
  double amplitude = 0.0;

  template <class S>
  S value(const std::array<S, N>& x) const {
    S d2(0.0);
    for (int i = 0; i < N; ++i) {
      const S dx = x[i] - center[i];
      d2 += dx * dx;
    }
    const double w2 = radius * radius;
    if (value_of(d2) >= w2) return S(0.0);
    const S t = 1.0 - d2 / w2;
    return amplitude * (t * t) * (t * t);
  }

  /// Smallest radius beyond which the bump vanishes.
  double outer_radius() const {
    double c2 = 0.0;
    for (double c : center) c2 += c * c;
    return std::sqrt(c2) + radius;
  }
};

/// Derivative evaluation policy for MetricField::jet.
struct DerivativeMode {
  enum class Kind { kAnalytic, kFiniteDifference };
  Kind kind = Kind::kAnalytic;
  /// Zero selects the default step policy.
  double step = 0.0;
  bool richardson = false;

  static DerivativeMode analytic() { return {}; }
  static DerivativeMode finite_difference(double step = 0.0, bool richardson = false) {
    return {Kind::kFiniteDifference, step, richardson};
  }
};

/// Point data consumed by all curvature code.
template <int N>
struct MetricJet {
  Vec<N> x = Vec<N>::Zero();
  Mat<N> g = Mat<N>::Identity();
  std::array<Mat<N>, N> dg{};                   // dg[k](i, j) = g_ij,k
  std::array<std::array<Mat<N>, N>, N> d2g{};   // d2g[k][l](i, j) = g_ij,kl
  Mat<N> sigma = Mat<N>::Zero();                // g - delta

  MetricJet() {
    for (auto& m : dg) m.setZero();
    for (auto& row : d2g)
      for (auto& m : row) m.setZero();
  }
};

template <int N>
class MetricField {
 public:
  using Family =
      std::variant<FlatHalfSpace<N>, HalfSchwarzschild<N>, ConformalPerturbation<N>, GraphMetric<N>>;

  explicit MetricField(Family family, DerivativeMode mode = DerivativeMode::analytic(),
                       std::optional<CompactBump<N>> bump = std::nullopt)
      : family_(std::move(family)), mode_(mode), bump_(bump) {
    static_assert(N >= 3, "manifold dimension must be at least 3");
    if (bump_ && !(bump_->radius > 0.0)) throw ParameterError("bump radius must be positive");
    // Positivity spot check at the bump peak and a few reference points.
    if (bump_) {
      Vec<N> c;
      for (int i = 0; i < N; ++i) c[i] = std::max(0.0, bump_->center[i]);
      if (family_core_radius() < c.norm() && !positive_definite(metric_unchecked(c))) {
        throw ParameterError("compact bump makes the metric indefinite");
      }
    }
  }

  static constexpr int dimension() { return N; }

  const Family& family() const { return family_; }
  const DerivativeMode& derivative_mode() const { return mode_; }
  const std::optional<CompactBump<N>>& bump() const { return bump_; }

  MetricField with_mode(DerivativeMode mode) const { return MetricField(family_, mode, bump_); }
  MetricField with_bump(CompactBump<N> bump) const { return MetricField(family_, mode_, bump); }

  std::string name() const {
    return std::visit([](const auto& f) { return std::string(f.kName); }, family_);
  }
  std::string params() const {
    std::string p = std::visit([](const auto& f) { return f.params(); }, family_);
    if (bump_) {
      p += ";perturb_amplitude=" + detail::format_number(bump_->amplitude) +
           ";perturb_radius=" + detail::format_number(bump_->radius);
    }
    return p;
  }
  /// Nominal decay rate tau of g - delta.
  double decay_rate() const {
    return std::visit([](const auto& f) { return f.decay_rate(); }, family_);
  }
  bool radially_conformal() const {
    return !bump_ && std::visit([](const auto& f) { return f.radially_conformal(); }, family_);
  }
  /// Thickness in x1 of a layer above the boundary face where the metric
  /// varies on a fixed scale; zero when there is none.
  double boundary_layer() const {
    return std::visit([](const auto& f) { return f.boundary_layer(); }, family_);
  }
  double family_core_radius() const {
    return std::visit([](const auto& f) { return f.core_radius(); }, family_);
  }

  /// Throws DomainError if x is not an admissible query point.
  void check_domain(const Vec<N>& x) const {
    if (!x.allFinite()) throw DomainError("non-finite query point");
    if (x[0] < -1e-12 * std::max(1.0, x.norm())) {
      throw DomainError("query point has x1 < 0, outside the half-space");
    }
    const double core = family_core_radius();
    if (core > 0.0 && !(x.norm() > core)) {
      throw DomainError("query point lies inside the excluded core r <= " +
                        detail::format_number(core) + " of " + name());
    }
  }

  template <class S>
  Components<S, N> components(const std::array<S, N>& x) const {
    Components<S, N> g = std::visit([&](const auto& f) { return f.template components<S>(x); }, family_);
    if (bump_) {
      const S b = bump_->value(x);
      for (int i = 0; i < N; ++i) g[i * N + i] += b;
    }
    return g;
  }

  Mat<N> metric(const Vec<N>& x) const {
    check_domain(x);
    return metric_unchecked(x);
  }

  /// Exact jet via second-order forward differentiation.
  MetricJet<N> analytic_jet(const Vec<N>& x) const {
    check_domain(x);
    std::array<Taylor2<N>, N> vars;
    for (int k = 0; k < N; ++k) vars[k] = Taylor2<N>::variable(k, x[k]);
    const Components<Taylor2<N>, N> c = components(vars);
    MetricJet<N> jet;
    jet.x = x;
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        // Symmetrize explicitly so index symmetries hold bit-exactly.
        const auto& a = c[i * N + j];
        const auto& b = c[j * N + i];
        jet.g(i, j) = 0.5 * (a.v + b.v);
        for (int k = 0; k < N; ++k) {
          jet.dg[k](i, j) = 0.5 * (a.d[k] + b.d[k]);
          for (int l = k; l < N; ++l) {
            const double h = 0.25 * (a.hess(k, l) + a.hess(l, k) + b.hess(k, l) + b.hess(l, k));
            jet.d2g[k][l](i, j) = h;
            jet.d2g[l][k](i, j) = h;
          }
        }
      }
    }
    jet.sigma = jet.g - Mat<N>::Identity();
    return jet;
  }

  static bool positive_definite(const Mat<N>& g) {
    Eigen::LLT<Mat<N>> llt(g);
    return llt.info() == Eigen::Success && g.allFinite();
  }

 private:
  Mat<N> metric_unchecked(const Vec<N>& x) const {
    Point<N> p;
    for (int k = 0; k < N; ++k) p[k] = x[k];
    const Components<double, N> c = components(p);
    Mat<N> g;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) g(i, j) = c[i * N + j];
    return 0.5 * (g + g.transpose());
  }

  Family family_;
  DerivativeMode mode_;
  std::optional<CompactBump<N>> bump_;
};

/// Step sizes for first and second finite-difference derivatives.
struct FdSteps {
  double first;
  double second;
};

/// Default step policy: eps^{1/3} max(1,|x|) for first derivatives and
/// eps^{1/4} max(1,|x|) for second derivatives.
template <int N>
FdSteps default_fd_steps(const Vec<N>& x) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(1.0, x.norm());
  return {std::cbrt(eps) * scale, std::pow(eps, 0.25) * scale};
}

namespace detail {

template <int N>
MetricJet<N> fd_jet_once(const MetricField<N>& field, const Vec<N>& x, FdSteps steps) {
  const double scale = std::max(1.0, x.norm());
  for (double h : {steps.first, steps.second}) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("finite-difference step must be positive");
    if (h < 64.0 * std::numeric_limits<double>::epsilon() * scale) {
      throw ParameterError("finite-difference step underflow");
    }
  }
  field.check_domain(x);
  auto at = [&](const Vec<N>& p) { return field.metric(p); };
  auto shifted = [&](int k, double s, int l = -1, double t = 0.0) {
    Vec<N> p = x;
    p[k] += s;
    if (l >= 0) p[l] += t;
    return p;
  };

  MetricJet<N> jet;
  jet.x = x;
  jet.g = at(x);
  jet.sigma = jet.g - Mat<N>::Identity();

  // Only the x1 direction (index 0) can hit the boundary face.
  auto one_sided = [&](int k, double h) { return k == 0 && x[0] - h < 0.0; };

  // First derivative of a matrix-valued function along k.
  auto d1 = [&](auto&& f, int k, double h) -> Mat<N> {
    if (one_sided(k, h)) {
      return (-3.0 * f(shifted(k, 0.0)) + 4.0 * f(shifted(k, h)) - f(shifted(k, 2.0 * h))) / (2.0 * h);
    }
    return (f(shifted(k, h)) - f(shifted(k, -h))) / (2.0 * h);
  };

  const double h1 = steps.first;
  for (int k = 0; k < N; ++k) jet.dg[k] = d1(at, k, h1);

  const double h2 = steps.second;
  for (int k = 0; k < N; ++k) {
    if (one_sided(k, h2)) {
      jet.d2g[k][k] = (2.0 * jet.g - 5.0 * at(shifted(k, h2)) + 4.0 * at(shifted(k, 2.0 * h2)) -
                       at(shifted(k, 3.0 * h2))) /
                      (h2 * h2);
    } else {
      jet.d2g[k][k] = (at(shifted(k, h2)) - 2.0 * jet.g + at(shifted(k, -h2))) / (h2 * h2);
    }
    for (int l = k + 1; l < N; ++l) {
      Mat<N> mixed;
      if (one_sided(k, h2)) {
        // One-sided along k of the central difference along l.
        auto central_l = [&](const Vec<N>& p) {
          Vec<N> pp = p, pm = p;
          pp[l] += h2;
          pm[l] -= h2;
          return Mat<N>((at(pp) - at(pm)) / (2.0 * h2));
        };
        mixed = d1(central_l, k, h2);
      } else {
        mixed = (at(shifted(k, h2, l, h2)) - at(shifted(k, h2, l, -h2)) - at(shifted(k, -h2, l, h2)) +
                 at(shifted(k, -h2, l, -h2))) /
                (4.0 * h2 * h2);
      }
      jet.d2g[k][l] = mixed;
      jet.d2g[l][k] = mixed;
    }
  }
  return jet;
}

}  // namespace detail

/// Finite-difference jet: central differences in tangential directions,
/// second-order one-sided differences along x1 near the boundary face.
/// With richardson = true the step is halved once and extrapolated.
template <int N>
MetricJet<N> fd_jet(const MetricField<N>& field, const Vec<N>& x, FdSteps steps,
                    bool richardson = false) {
  MetricJet<N> coarse = detail::fd_jet_once(field, x, steps);
  if (!richardson) return coarse;
  const MetricJet<N> fine = detail::fd_jet_once(field, x, FdSteps{0.5 * steps.first, 0.5 * steps.second});
  MetricJet<N> out = fine;
  for (int k = 0; k < N; ++k) {
    out.dg[k] = (4.0 * fine.dg[k] - coarse.dg[k]) / 3.0;
    for (int l = 0; l < N; ++l) out.d2g[k][l] = (4.0 * fine.d2g[k][l] - coarse.d2g[k][l]) / 3.0;
  }
  return out;
}

template <int N>
MetricJet<N> fd_jet(const MetricField<N>& field, const Vec<N>& x, double step, bool richardson = false) {
  return fd_jet(field, x, FdSteps{step, step}, richardson);
}

/// Jet according to the field's derivative mode.
template <int N>
MetricJet<N> eval_jet(const MetricField<N>& field, const Vec<N>& x) {
  const DerivativeMode& mode = field.derivative_mode();
  if (mode.kind == DerivativeMode::Kind::kAnalytic) return field.analytic_jet(x);
  const FdSteps steps = mode.step > 0.0 ? FdSteps{mode.step, mode.step} : default_fd_steps<N>(x);
  return fd_jet(field, x, steps, mode.richardson);
}

// ---------------------------------------------------------------------------
// Registry

/// Family name plus parameters, as read from a run configuration.
struct MetricSpec {
  std::string family = "flat";
  /// Manifold dimension, except for "graph" where it is the base dimension.
  int n = 3;
  std::map<std::string, double> params;
  bool finite_difference = false;

  double param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

struct FamilyParameter {
  std::string name;
  double default_value;
  std::string description;
};

struct FamilyInfo {
  std::string name;
  std::string description;
  std::vector<FamilyParameter> parameters;
};

inline const std::vector<FamilyInfo>& metric_families() {
  static const std::vector<FamilyInfo> kFamilies = {
      {"flat", "Euclidean half-space R^n_+", {}},
      {"half-schwarzschild",
       "isotropic Schwarzschild slice (1 + m/(2 r^{n-2}))^{4/(n-2)} delta on x1 >= 0",
       {{"m", 1.0, "mass parameter, > 0"}}},
      {"conformal",
       "psi(r) delta with psi = 1 + a (1 + r^2)^{-tau/2}",
       {{"a", 1.0, "amplitude, > -1"}, {"tau", 1.0, "decay rate, > (n-2)/2"}}},
      {"graph",
       "metric pulled back by (x0, X) -> (x0 + v(x0) u(X), X), u = a/|X|; n is the base dimension",
       {{"a", -1.0 / (8.0 * std::numbers::pi), "profile amplitude"},
        {"bump_amplitude", 0.0, "amplitude of a compact bump added to u"},
        {"bump_radius", 1.0, "support radius of the bump"},
        {"bump_center", 0.0, "bump center along the first base axis"}}},
  };
  return kFamilies;
}

/// Dimension of the manifold described by spec.
inline int manifold_dimension(const MetricSpec& spec) {
  return spec.family == "graph" ? spec.n + 1 : spec.n;
}

namespace detail {

inline void check_known_params(const MetricSpec& spec, const FamilyInfo& info) {
  for (const auto& [key, value] : spec.params) {
    if (key.rfind("perturb_", 0) == 0) continue;
    const bool known = std::any_of(info.parameters.begin(), info.parameters.end(),
                                   [&](const FamilyParameter& p) { return p.name == key; });
    if (!known) throw ParameterError("unknown parameter '" + key + "' for family " + info.name);
  }
}

}  // namespace detail

/// Graph profile from spec parameters (a, bump_*).
template <int Base>
GraphSpec<Base> make_graph_spec(const MetricSpec& spec) {
  GraphSpec<Base> g;
  g.amplitude = spec.param("a", -1.0 / (8.0 * std::numbers::pi));
  g.bump_amplitude = spec.param("bump_amplitude", 0.0);
  g.bump_radius = spec.param("bump_radius", 1.0);
  g.bump_center[0] = spec.param("bump_center", 0.0);
  return g;
}

/// Instantiates a registered family. N must equal manifold_dimension(spec).
template <int N>
MetricField<N> make_metric(const MetricSpec& spec) {
  if (manifold_dimension(spec) != N) {
    throw ParameterError("metric spec dimension does not match the requested instantiation");
  }
  const auto& families = metric_families();
  auto info = std::find_if(families.begin(), families.end(),
                           [&](const FamilyInfo& f) { return f.name == spec.family; });
  if (info == families.end()) throw ParameterError("unknown metric family '" + spec.family + "'");
  detail::check_known_params(spec, *info);

  const DerivativeMode mode =
      spec.finite_difference ? DerivativeMode::finite_difference() : DerivativeMode::analytic();

  std::optional<CompactBump<N>> bump;
  if (spec.params.count("perturb_amplitude")) {
    CompactBump<N> b;
    b.amplitude = spec.param("perturb_amplitude", 0.0);
    b.radius = spec.param("perturb_radius", 1.0);
    b.center[0] = spec.param("perturb_center", 0.0);
    bump = b;
  }

  typename MetricField<N>::Family family = FlatHalfSpace<N>{};
  if (spec.family == "half-schwarzschild") {
    family = HalfSchwarzschild<N>(spec.param("m", 1.0));
  } else if (spec.family == "conformal") {
    family = ConformalPerturbation<N>(spec.param("a", 1.0), spec.param("tau", 1.0));
  } else if (spec.family == "graph") {
    family = GraphMetric<N>(make_graph_spec<N - 1>(spec));
  }
  return MetricField<N>(family, mode, bump);
}

}  // namespace qlmass
