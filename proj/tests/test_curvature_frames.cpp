#include <gtest/gtest.h>

#include <cmath>

#include "qlmass/curvature_frames.hpp"

using namespace qlmass;

namespace {

Vec<3> v3(double a, double b, double c) { return Vec<3>(a, b, c); }

double phi(double m, double r) { return 1.0 + 0.5 * m / r; }

}  // namespace

TEST(Curvature, FlatIsZero) {
  const MetricField<4> f{FlatHalfSpace<4>{}};
  const auto c = curvature(f, Vec<4>(1.0, 2.0, 3.0, 4.0));
  EXPECT_EQ(c.ricci.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(c.scalar, 0.0);
  for (const auto& gk : c.gamma) EXPECT_EQ(gk.cwiseAbs().maxCoeff(), 0.0);
}

// Frozen from tests/oracles/derive.py.
TEST(Curvature, ConformalChristoffelAndScalar) {
  const MetricField<3> f{ConformalPerturbation<3>(1.0, 1.0)};
  const auto c = curvature(f, v3(1.0, 2.0, 2.0));
  EXPECT_NEAR(c.gamma[0](0, 1), -0.024025307335204215, 1e-15);
  EXPECT_NEAR(c.gamma[1](0, 0), 0.024025307335204215, 1e-15);
  EXPECT_NEAR(c.scalar, 0.016872149922627580, 1e-14);
  for (int k = 0; k < 3; ++k) EXPECT_EQ((c.gamma[k] - c.gamma[k].transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Curvature, SchwarzschildIsScalarFlat) {
  for (double r : {1.0, 3.0, 30.0}) {
    const MetricField<3> f{HalfSchwarzschild<3>(1.0)};
    const auto c = curvature(f, v3(0.2 * r, 0.6 * r, 0.8 * r - 0.0));
    EXPECT_NEAR(c.scalar, 0.0, 1e-12 * std::pow(r, -3)) << "r=" << r;
    EXPECT_GT(c.ricci.norm(), 0.0);
  }
  const MetricField<5> f5{HalfSchwarzschild<5>(1.0)};
  Vec<5> x;
  x << 0.5, 1.0, 0.5, -0.5, 1.0;
  EXPECT_NEAR(curvature(f5, x).scalar, 0.0, 1e-11);
}

TEST(Curvature, TraceIdentity) {
  const MetricField<4> f{ConformalPerturbation<4>(0.5, 1.5)};
  const auto c = curvature(f, Vec<4>(0.3, 1.0, -0.7, 0.2));
  const double tr = c.ginv.cwiseProduct(c.einstein).sum();
  EXPECT_NEAR(tr, (1.0 - 4.0 / 2.0) * c.scalar, 1e-14);
  EXPECT_NEAR((c.ricci - c.ricci.transpose()).cwiseAbs().maxCoeff(), 0.0, 1e-16);
}

TEST(Curvature, ContractedBianchi) {
  const MetricField<3> f{ConformalPerturbation<3>(1.0, 1.0)};
  const auto [div, scale] = einstein_divergence(f, v3(0.8, 1.1, -0.6), 1e-3);
  EXPECT_GT(scale, 1e-3);
  EXPECT_LT(div.cwiseAbs().maxCoeff(), 1e-8 * scale);
}

TEST(Curvature, LinearizedRicciAgreesToFirstOrder) {
  // The remainder is quadratic in the perturbation size.
  auto defect = [](double a) {
    const MetricField<3> f{ConformalPerturbation<3>(a, 1.0)};
    const auto jet = f.analytic_jet(v3(0.5, 0.5, 0.5));
    return (curvature(jet).ricci - linearized_ricci(jet)).norm();
  };
  EXPECT_NEAR(std::log2(defect(1e-2) / defect(5e-3)), 2.0, 0.05);
}

TEST(BoundaryFrames, FlatBoundary) {
  const MetricField<3> f{FlatHalfSpace<3>{}};
  const auto b = boundary_frame(f, v3(0.0, 4.0, 1.0));
  EXPECT_EQ(b.mu, v3(-1.0, 0.0, 0.0));
  EXPECT_EQ(b.A.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(b.H, 0.0);
}

TEST(BoundaryFrames, SchwarzschildBoundaryIsTotallyGeodesic) {
  const MetricField<3> f{HalfSchwarzschild<3>(1.0)};
  const auto b = boundary_frame(f, v3(0.0, 3.0, -2.0));
  EXPECT_NEAR(b.mu.dot(f.metric(b.point) * b.mu), 1.0, 1e-14);
  EXPECT_NEAR(b.A.cwiseAbs().maxCoeff(), 0.0, 1e-16);
  EXPECT_NEAR(b.H, 0.0, 1e-16);
}

TEST(BoundaryFrames, GraphBoundaryMatchesProfileHessian) {
  // On the boundary v = 1 and v' = 0, so A_ab = u_ab / sqrt(1 + |Du|^2) up to sign.
  GraphSpec<3> gs;
  gs.amplitude = 0.3;
  const MetricField<4> f{GraphMetric<4>(gs)};
  const Vec<4> y(0.0, 2.0, 1.0, -1.0);
  const auto b = boundary_frame(f, y);
  const auto d = gs.derivatives({2.0, 1.0, -1.0});
  double grad2 = 0.0;
  for (double v : d.gradient) grad2 += v * v;
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c)
      EXPECT_NEAR(std::abs(b.A(a, c)), std::abs(d.hessian[a * 3 + c]) / std::sqrt(1.0 + grad2), 1e-12);
  EXPECT_NEAR(b.mu.dot(f.metric(y) * b.mu), 1.0, 1e-13);
  for (int a = 1; a < 4; ++a) EXPECT_NEAR((f.metric(y) * b.mu)[a], 0.0, 1e-14);
  EXPECT_NEAR(b.H, (b.h.inverse() * b.A).trace(), 1e-14);
}

TEST(SurfaceFrames, FlatSphere) {
  const MetricField<3> f{FlatHalfSpace<3>{}};
  const auto s = surface_frame(f, v3(3.0, 0.0, 4.0));
  EXPECT_NEAR(s.H, 2.0 / 5.0, 1e-15);
  EXPECT_NEAR(s.A_norm_sq, 2.0 / 25.0, 1e-15);
  EXPECT_NEAR((s.nu - v3(0.6, 0.0, 0.8)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(s.measure_ratio, 1.0, 1e-15);
}

// Frozen from tests/oracles/derive.py (H = div_g nu, computed symbolically).
TEST(SurfaceFrames, SchwarzschildMeanCurvature) {
  const MetricField<3> f{HalfSchwarzschild<3>(1.0)};
  EXPECT_NEAR(surface_frame(f, v3(0.0, 2.0, 0.0)).H, 0.384, 1e-14);
  EXPECT_NEAR(surface_frame(f, v3(3.0, 4.0, 0.0)).H, 0.27047332832456799, 1e-14);
  EXPECT_NEAR(surface_frame(f, v3(6.0, 0.0, 8.0)).H, 0.16412914372098046, 1e-14);
}

TEST(SurfaceFrames, NormalAndTangentsAreOrthonormal) {
  GraphSpec<3> gs;
  gs.amplitude = -0.2;
  const MetricField<4> f{GraphMetric<4>(gs)};
  const Vec<4> x(1.5, 2.0, -3.0, 1.0);
  const auto s = surface_frame(f, x);
  const Mat<4> g = f.metric(x);
  EXPECT_NEAR(s.nu.dot(g * s.nu), 1.0, 1e-12);
  for (const auto& t : s.tangents) EXPECT_NEAR(t.dot(g * s.nu), 0.0, 1e-12);
  for (const auto& t : s.tangents) EXPECT_NEAR(t.dot(x), 0.0, 1e-12);
}

TEST(EdgeFrames, FlatEquator) {
  const MetricField<3> f{FlatHalfSpace<3>{}};
  const auto e = edge_frame(f, v3(0.0, 0.0, 4.0));
  EXPECT_NEAR(e.H_edge_in_boundary, 0.25, 1e-15);
  EXPECT_NEAR(e.H_edge_in_surface, 0.0, 1e-15);
  EXPECT_NEAR(e.contact_cosine, 0.0, 1e-15);
  EXPECT_NEAR((e.vartheta - v3(0.0, 0.0, 1.0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((e.mu_prime - v3(-1.0, 0.0, 0.0)).norm(), 0.0, 1e-15);
}

TEST(EdgeFrames, SchwarzschildEquator) {
  const double m = 1.0, r = 4.0;
  const MetricField<3> f{HalfSchwarzschild<3>(m)};
  const Vec<3> x = v3(0.0, 0.0, r);
  const auto e = edge_frame(f, x);
  const Mat<3> g = f.metric(x);
  EXPECT_NEAR(e.vartheta.dot(g * e.vartheta), 1.0, 1e-12);
  EXPECT_NEAR(e.mu_prime.dot(g * e.mu_prime), 1.0, 1e-12);
  EXPECT_EQ(e.vartheta[0], 0.0);
  for (const auto& t : e.tangents) {
    EXPECT_NEAR(t.dot(g * e.vartheta), 0.0, 1e-12);
    EXPECT_NEAR(t.dot(g * e.mu_prime), 0.0, 1e-12);
  }
  EXPECT_NEAR(e.contact_cosine, 0.0, 1e-14);
  // The equator is a great circle of the totally geodesic sphere cap.
  EXPECT_NEAR(e.H_edge_in_surface, 0.0, 1e-14);
  // Circle of radius r in the plane with conformal factor phi^4.
  const double p = phi(m, r), dp = -0.5 * m / (r * r);
  EXPECT_NEAR(e.H_edge_in_boundary, (1.0 / (r * p * p)) * (1.0 + 2.0 * r * dp / p), 1e-14);
}

TEST(EdgeFrames, GraphContactIsNotOrthogonal) {
  GraphSpec<3> gs;
  gs.amplitude = 0.2;
  const MetricField<4> f{GraphMetric<4>(gs)};
  const auto e = edge_frame(f, Vec<4>(0.0, 0.0, 3.0, 4.0));
  EXPECT_GT(std::abs(e.contact_cosine), 1e-4);
  EXPECT_LT(std::abs(e.contact_cosine), 0.1);
}
