#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qlmass/metric_models.hpp"

using namespace qlmass;

namespace {

MetricField<3> schwarzschild3(double m = 1.0) { return MetricField<3>(HalfSchwarzschild<3>(m)); }

Vec<3> v3(double a, double b, double c) { return Vec<3>(a, b, c); }

double max_jet_error(const MetricJet<3>& a, const MetricJet<3>& b, bool second) {
  double e = 0.0;
  for (int k = 0; k < 3; ++k) {
    e = std::max(e, (a.dg[k] - b.dg[k]).cwiseAbs().maxCoeff());
    if (second)
      for (int l = 0; l < 3; ++l) e = std::max(e, (a.d2g[k][l] - b.d2g[k][l]).cwiseAbs().maxCoeff());
  }
  return e;
}

}  // namespace

// Frozen from tests/oracles/derive.py.
TEST(MetricModels, SchwarzschildValueAndDerivatives) {
  const auto f = schwarzschild3();
  const auto jet = f.analytic_jet(v3(0.0, 2.0, 0.0));
  EXPECT_NEAR(jet.g(0, 0), 2.44140625, 1e-14);
  EXPECT_NEAR(jet.g(1, 1), 2.44140625, 1e-14);
  EXPECT_EQ(jet.g(0, 1), 0.0);
  EXPECT_NEAR(jet.dg[1](0, 0), -0.9765625, 1e-14);
  EXPECT_NEAR(jet.d2g[1][1](0, 0), 1.26953125, 1e-13);

  const auto off = f.analytic_jet(v3(1.0, 2.0, 2.0));
  EXPECT_NEAR(off.d2g[0][1](0, 0), 0.089620484682213077, 1e-14);
}

TEST(MetricModels, IndexSymmetriesAndSigma) {
  GraphSpec<3> gs;
  gs.amplitude = -0.1;
  const MetricField<4> f{GraphMetric<4>(gs)};
  Vec<4> x(0.7, 1.5, -0.4, 2.2);
  const auto jet = f.analytic_jet(x);
  EXPECT_EQ((jet.g - jet.g.transpose()).cwiseAbs().maxCoeff(), 0.0);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ((jet.dg[k] - jet.dg[k].transpose()).cwiseAbs().maxCoeff(), 0.0);
    for (int l = 0; l < 4; ++l) EXPECT_EQ((jet.d2g[k][l] - jet.d2g[l][k]).cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ((jet.sigma - (jet.g - Mat<4>::Identity())).cwiseAbs().maxCoeff(), 0.0);
}

TEST(MetricModels, FlatIsIdentity) {
  const MetricField<5> f{FlatHalfSpace<5>{}};
  Vec<5> x;
  x << 0.0, 1.0, -2.0, 3.0, 0.5;
  const auto jet = f.analytic_jet(x);
  EXPECT_EQ(jet.g, Mat<5>::Identity());
  for (int k = 0; k < 5; ++k) EXPECT_EQ(jet.dg[k].cwiseAbs().maxCoeff(), 0.0);
}

TEST(MetricModels, DomainErrors) {
  const auto f = schwarzschild3();
  EXPECT_THROW(f.metric(v3(-0.5, 1.0, 1.0)), DomainError);
  EXPECT_THROW(f.metric(v3(0.0, 0.3, 0.0)), DomainError);
  EXPECT_THROW(f.metric(v3(NAN, 2.0, 0.0)), DomainError);
  EXPECT_NO_THROW(f.metric(v3(0.0, 0.6, 0.0)));
}

TEST(MetricModels, ParameterErrors) {
  EXPECT_THROW(HalfSchwarzschild<3>(-1.0), ParameterError);
  EXPECT_THROW(HalfSchwarzschild<3>(0.0), ParameterError);
  EXPECT_THROW((ConformalPerturbation<3>(-1.5, 1.0)), ParameterError);
  EXPECT_THROW((ConformalPerturbation<4>(1.0, 1.0)), ParameterError);
  GraphSpec<3> big;
  big.amplitude = 5.0;
  EXPECT_THROW(GraphMetric<4>{big}, ParameterError);
  MetricSpec s;
  s.family = "kerr";
  EXPECT_THROW(make_metric<3>(s), ParameterError);
  s.family = "half-schwarzschild";
  s.params["q"] = 1.0;
  EXPECT_THROW(make_metric<3>(s), ParameterError);
}

TEST(MetricModels, FiniteDifferenceMatchesAnalytic) {
  const MetricField<3> f{ConformalPerturbation<3>(2.0, 1.0)};
  const Vec<3> x = v3(1.0, 2.0, -1.5);
  const auto exact = f.analytic_jet(x);
  EXPECT_LT(max_jet_error(exact, fd_jet(f, x, default_fd_steps<3>(x)), true), 1e-6);
  EXPECT_LT(max_jet_error(exact, fd_jet(f, x, default_fd_steps<3>(x), true), true), 1e-7);
}

TEST(MetricModels, FiniteDifferenceOrderTwo) {
  const auto f = schwarzschild3();
  for (const Vec<3>& x : {v3(1.0, 2.0, 0.5), v3(0.0, 2.0, 1.0)}) {
    const auto exact = f.analytic_jet(x);
    const double e1 = max_jet_error(exact, fd_jet(f, x, 1e-2), false);
    const double e2 = max_jet_error(exact, fd_jet(f, x, 5e-3), false);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.15) << "at x1 = " << x[0];
  }
}

TEST(MetricModels, BoundaryStencilStaysInHalfSpace) {
  // A metric undefined for x1 < 0 would throw if the stencil crossed the face.
  const auto f = schwarzschild3();
  const Vec<3> x = v3(0.0, 3.0, 1.0);
  EXPECT_NO_THROW(fd_jet(f, x, 1e-3));
  EXPECT_LT(max_jet_error(f.analytic_jet(x), fd_jet(f, x, 1e-4, true), true), 1e-5);
}

TEST(MetricModels, FdStepGuards) {
  const auto f = schwarzschild3();
  EXPECT_THROW(fd_jet(f, v3(1.0, 2.0, 0.0), 0.0), ParameterError);
  EXPECT_THROW(fd_jet(f, v3(1.0, 2.0, 0.0), 1e-18), ParameterError);
}

TEST(MetricModels, ReflectionSymmetryOfRadialFamilies) {
  const auto f = schwarzschild3(0.7);
  for (const Vec<3>& x : {v3(0.3, 2.0, 1.0), v3(2.0, -1.0, 4.0)}) {
    Vec<3> y = x;
    y[1] = -y[1];
    EXPECT_NEAR(f.metric(x)(0, 0), f.metric(y)(0, 0), 1e-15);
  }
}

TEST(MetricModels, GraphMetricAtBoundary) {
  GraphSpec<3> gs;
  gs.amplitude = -1.0 / (8.0 * std::numbers::pi);
  const MetricField<4> f{GraphMetric<4>(gs)};
  const Vec<4> x(0.0, 3.0, -1.0, 2.0);
  const auto g = f.metric(x);
  const auto du = gs.profile_gradient(std::array<double, 3>{3.0, -1.0, 2.0});
  for (int a = 0; a < 3; ++a) {
    EXPECT_NEAR(g(0, a + 1), du[a], 1e-15);
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(g(a + 1, b + 1), (a == b) + du[a] * du[b], 1e-15);
  }
  EXPECT_EQ(gs.taper(0.0), 1.0);
}

TEST(MetricModels, GraphProfileBounds) {
  GraphSpec<3> gs;
  gs.amplitude = 0.2;
  double worst = 0.0;
  for (double s : {1.0, 5.0, 50.0, 500.0}) {
    const auto d = gs.derivatives({s, 0.0, 0.0});
    double grad = 0.0, hess = 0.0;
    for (double v : d.gradient) grad += v * v;
    for (double v : d.hessian) hess += v * v;
    worst = std::max(worst, s * s * std::sqrt(grad) + s * s * s * std::sqrt(hess));
    EXPECT_LE(std::abs(d.value), gs.profile_bound());
  }
  EXPECT_LT(worst, 1.0);
  // C^2 matching at |X| = 1.
  const auto in = gs.derivatives({1.0 - 1e-9, 0.0, 0.0});
  const auto out = gs.derivatives({1.0 + 1e-9, 0.0, 0.0});
  EXPECT_NEAR(in.value, out.value, 1e-8);
  EXPECT_NEAR(in.gradient[0], out.gradient[0], 1e-8);
  EXPECT_NEAR(in.hessian[0], out.hessian[0], 1e-7);
}

TEST(MetricModels, DecayBoundsAlongRays) {
  const MetricField<3> f{ConformalPerturbation<3>(1.0, 1.5)};
  for (double r : {10.0, 100.0, 1000.0}) {
    const auto jet = f.analytic_jet(v3(r / std::sqrt(2.0), r / std::sqrt(2.0), 0.0));
    double d1 = 0.0, d2 = 0.0;
    for (int k = 0; k < 3; ++k) {
      d1 = std::max(d1, jet.dg[k].cwiseAbs().maxCoeff());
      for (int l = 0; l < 3; ++l) d2 = std::max(d2, jet.d2g[k][l].cwiseAbs().maxCoeff());
    }
    EXPECT_LT(jet.sigma.cwiseAbs().maxCoeff() * std::pow(r, 1.5), 1.01);
    EXPECT_LT(d1 * std::pow(r, 2.5), 1.6);
    EXPECT_LT(d2 * std::pow(r, 3.5), 4.0);
  }
}

TEST(MetricModels, CompactBumpSupport) {
  CompactBump<3> b;
  b.center = {5.0, 0.0, 0.0};
  b.radius = 2.0;
  b.amplitude = 0.3;
  const auto f = schwarzschild3().with_bump(b);
  EXPECT_EQ(f.metric(v3(10.0, 0.0, 0.0)), schwarzschild3().metric(v3(10.0, 0.0, 0.0)));
  EXPECT_NEAR(f.metric(v3(5.0, 0.0, 0.0))(1, 1) - schwarzschild3().metric(v3(5.0, 0.0, 0.0))(1, 1), 0.3, 1e-15);
  EXPECT_DOUBLE_EQ(b.outer_radius(), 7.0);
  EXPECT_FALSE(f.radially_conformal());
}

TEST(MetricModels, RegistryRoundTrip) {
  for (const auto& info : metric_families()) {
    MetricSpec s;
    s.family = info.name;
    s.n = 3;
    const int dim = manifold_dimension(s);
    if (dim == 3) {
      EXPECT_EQ(make_metric<3>(s).name(), info.name);
    } else {
      EXPECT_EQ(make_metric<4>(s).name(), info.name);
    }
  }
  MetricSpec s;
  s.family = "conformal";
  s.params = {{"a", 2.0}, {"tau", 1.0}};
  EXPECT_EQ(make_metric<3>(s).params(), "n=3;a=2;tau=1");
  EXPECT_THROW(make_metric<4>(s), ParameterError);
}
