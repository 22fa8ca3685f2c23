#pragma once

// Curvature from metric jets, and the geometric frames used by the mass
// integrands: the boundary dM = {x1 = 0}, the coordinate hemisphere
// {|x| = r, x1 >= 0} and its equator {|x| = r, x1 = 0}.
//
// Second fundamental forms of level sets are computed as Hess_g(f) / |df|_g
// for the defining function f (x1 or |x|); traces use the tangential
// projector g^{-1} - sum n n^T. No angular charts are involved, so the pole of
// the hemisphere is not special.

#include <array>
#include <cmath>
#include <vector>

#include "qlmass/common.hpp"
#include "qlmass/metric_models.hpp"

namespace qlmass {

/// gamma[k](i, j) = Gamma^k_ij.
template <int N>
using Christoffel = std::array<Mat<N>, N>;

template <int N>
struct CurvaturePack {
  Mat<N> g;
  Mat<N> ginv;
  Christoffel<N> gamma;
  Mat<N> ricci;
  double scalar = 0.0;
  Mat<N> einstein;
};

namespace detail {

template <int N>
Mat<N> checked_inverse(const Mat<N>& g) {
  Eigen::LLT<Mat<N>> llt(g);
  if (llt.info() != Eigen::Success) throw GeometryError("metric is singular or not positive definite");
  return llt.solve(Mat<N>::Identity());
}

/// Gamma_{l ij} = 1/2 (g_li,j + g_lj,i - g_ij,l), stored lowered[l](i, j).
template <int N>
std::array<Mat<N>, N> lowered_christoffel(const MetricJet<N>& jet) {
  std::array<Mat<N>, N> low;
  for (int l = 0; l < N; ++l) {
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        low[l](i, j) = 0.5 * (jet.dg[j](l, i) + jet.dg[i](l, j) - jet.dg[l](i, j));
      }
    }
  }
  return low;
}

}  // namespace detail

template <int N>
Christoffel<N> christoffel(const MetricJet<N>& jet, const Mat<N>& ginv) {
  const auto low = detail::lowered_christoffel(jet);
  Christoffel<N> gamma;
  for (int k = 0; k < N; ++k) {
    gamma[k].setZero();
    for (int l = 0; l < N; ++l) gamma[k] += ginv(k, l) * low[l];
  }
  return gamma;
}

template <int N>
Christoffel<N> christoffel(const MetricJet<N>& jet) {
  return christoffel(jet, detail::checked_inverse(jet.g));
}

/// Ricci, scalar and Einstein curvature from the jet. Derivatives of the
/// Christoffel symbols are formed from g_ij,kl, so no third derivatives of g
/// are needed.
template <int N>
CurvaturePack<N> curvature(const MetricJet<N>& jet) {
  CurvaturePack<N> pack;
  pack.g = jet.g;
  pack.ginv = detail::checked_inverse(jet.g);
  const auto low = detail::lowered_christoffel(jet);
  for (int k = 0; k < N; ++k) {
    pack.gamma[k].setZero();
    for (int l = 0; l < N; ++l) pack.gamma[k] += pack.ginv(k, l) * low[l];
  }

  // dgamma[m][k](i, j) = d_m Gamma^k_ij
  std::array<Christoffel<N>, N> dgamma;
  for (int m = 0; m < N; ++m) {
    const Mat<N> dginv = -pack.ginv * jet.dg[m] * pack.ginv;
    std::array<Mat<N>, N> dlow;
    for (int l = 0; l < N; ++l) {
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
          dlow[l](i, j) = 0.5 * (jet.d2g[j][m](l, i) + jet.d2g[i][m](l, j) - jet.d2g[l][m](i, j));
        }
      }
    }
    for (int k = 0; k < N; ++k) {
      dgamma[m][k].setZero();
      for (int l = 0; l < N; ++l) dgamma[m][k] += dginv(k, l) * low[l] + pack.ginv(k, l) * dlow[l];
    }
  }

  // Rc_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik
  for (int i = 0; i < N; ++i) {
    for (int j = i; j < N; ++j) {
      double rc = 0.0;
      for (int k = 0; k < N; ++k) {
        rc += dgamma[k][k](i, j) - dgamma[j][k](i, k);
        for (int l = 0; l < N; ++l) {
          rc += pack.gamma[k](k, l) * pack.gamma[l](i, j) - pack.gamma[k](j, l) * pack.gamma[l](i, k);
        }
      }
      pack.ricci(i, j) = rc;
      pack.ricci(j, i) = rc;
    }
  }
  pack.scalar = (pack.ginv.cwiseProduct(pack.ricci)).sum();
  pack.einstein = pack.ricci - 0.5 * pack.scalar * pack.g;
  return pack;
}

template <int N>
CurvaturePack<N> curvature(const MetricField<N>& field, const Vec<N>& x) {
  return curvature(eval_jet(field, x));
}

/// 1/2 (g_ki,kj + g_kj,ki - g_ij,kk - g_kk,ij): the Ricci tensor linearized
/// about the Euclidean metric.
template <int N>
Mat<N> linearized_ricci(const MetricJet<N>& jet) {
  Mat<N> lin;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      double s = 0.0;
      for (int k = 0; k < N; ++k) {
        s += jet.d2g[k][j](k, i) + jet.d2g[k][i](k, j) - jet.d2g[k][k](i, j) - jet.d2g[i][j](k, k);
      }
      lin(i, j) = 0.5 * s;
    }
  }
  return lin;
}

/// Contracted Bianchi residual nabla^i G_ij, with d_k G_ij by central
/// differences of the exact Einstein tensor (one extra layer). Returns the
/// residual and the magnitude of the largest contributing term.
template <int N>
std::pair<Vec<N>, double> einstein_divergence(const MetricField<N>& field, const Vec<N>& x, double step) {
  const CurvaturePack<N> c = curvature(field, x);
  std::array<Mat<N>, N> dG;
  for (int k = 0; k < N; ++k) {
    Vec<N> xp = x, xm = x, xp2 = x, xm2 = x;
    xp[k] += step;
    xm[k] -= step;
    xp2[k] += 2.0 * step;
    xm2[k] -= 2.0 * step;
    // Fourth-order central difference.
    dG[k] = (8.0 * (curvature(field, xp).einstein - curvature(field, xm).einstein) -
             (curvature(field, xp2).einstein - curvature(field, xm2).einstein)) /
            (12.0 * step);
  }
  Vec<N> div = Vec<N>::Zero();
  double scale = 0.0;
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      for (int k = 0; k < N; ++k) {
        double t = dG[k](i, j);
        for (int l = 0; l < N; ++l) {
          t -= c.gamma[l](k, i) * c.einstein(l, j) + c.gamma[l](k, j) * c.einstein(i, l);
        }
        const double term = c.ginv(i, k) * t;
        div[j] += term;
        scale = std::max(scale, std::abs(c.ginv(i, k) * dG[k](i, j)));
      }
    }
  }
  return {div, scale};
}

// ---------------------------------------------------------------------------
// Frames

template <int N>
struct BoundaryFrame {
  Vec<N> point;
  /// Outward unit normal of dM in M.
  Vec<N> mu;
  /// Induced metric h_ab and second fundamental form A_ab, a, b = 2..n.
  Eigen::Matrix<double, N - 1, N - 1> h;
  Eigen::Matrix<double, N - 1, N - 1> A;
  /// A as a covariant form in ambient indices (only tangential entries are
  /// meaningful): A_ij = Gamma^1_ij / sqrt(g^11).
  Mat<N> A_ambient;
  double H = 0.0;
};

template <int N>
struct SurfaceFrame {
  Vec<N> position;
  /// Outward unit normal of the hemisphere in M.
  Vec<N> nu;
  /// g-orthonormal tangent basis.
  std::array<Vec<N>, N - 1> tangents;
  /// Second fundamental form as an ambient covariant form, Hess_g|x| / |d|x||_g.
  Mat<N> A;
  double H = 0.0;
  double A_norm_sq = 0.0;
  /// dsigma_g / dsigma_euclidean at this point.
  double measure_ratio = 1.0;
};

template <int N>
struct EdgeFrame {
  Vec<N> position;
  /// Outward unit normal of the equator inside dM.
  Vec<N> vartheta;
  /// Outward unit normal of the equator inside the hemisphere.
  Vec<N> mu_prime;
  /// Normals of dM and of the hemisphere at the same point.
  Vec<N> mu;
  Vec<N> nu;
  std::array<Vec<N>, N - 2> tangents;
  double H_edge_in_surface = 0.0;   // H of the equator in the hemisphere (w.r.t. mu')
  double H_edge_in_boundary = 0.0;  // H of the equator in dM (w.r.t. vartheta)
  double contact_cosine = 0.0;      // g(vartheta, mu')
  /// dtheta_g / dtheta_euclidean at this point.
  double measure_ratio = 1.0;
};

namespace detail {

/// Euclidean orthonormal basis of the orthogonal complement of `normals`
/// (which must be Euclidean orthonormal), of size K.
template <int N, int K>
std::array<Vec<N>, K> euclidean_complement(const std::vector<Vec<N>>& normals) {
  std::array<Vec<N>, K> basis;
  int found = 0;
  // Candidates ordered by how little of them lies in the normal space.
  std::array<std::pair<double, int>, N> order;
  for (int i = 0; i < N; ++i) {
    double along = 0.0;
    for (const auto& n : normals) along += n[i] * n[i];
    order[i] = {along, i};
  }
  std::sort(order.begin(), order.end());
  for (const auto& [along, i] : order) {
    if (found == K) break;
    Vec<N> v = Vec<N>::Unit(i);
    for (const auto& n : normals) v -= n.dot(v) * n;
    for (int b = 0; b < found; ++b) v -= basis[b].dot(v) * basis[b];
    const double len = v.norm();
    if (len < 1e-8) continue;
    basis[found++] = v / len;
  }
  if (found != K) throw GeometryError("degenerate tangent basis");
  return basis;
}

template <int N, int K>
std::array<Vec<N>, K> g_orthonormalize(const std::array<Vec<N>, K>& in, const Mat<N>& g) {
  std::array<Vec<N>, K> out;
  for (int a = 0; a < K; ++a) {
    Vec<N> v = in[a];
    for (int b = 0; b < a; ++b) v -= (out[b].dot(g * v)) * out[b];
    const double len2 = v.dot(g * v);
    if (!(len2 > 0.0)) throw GeometryError("degenerate tangent basis in metric inner product");
    out[a] = v / std::sqrt(len2);
  }
  return out;
}

template <int N, int K>
double gram_root(const std::array<Vec<N>, K>& e, const Mat<N>& g) {
  Eigen::Matrix<double, K, K> gram;
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) gram(a, b) = e[a].dot(g * e[b]);
  return std::sqrt(gram.determinant());
}

template <int N>
double projected_trace(const Mat<N>& projector, const Mat<N>& form) {
  return projector.cwiseProduct(form).sum();
}

/// Hess_g |x| = (delta - x x^T / r^2) / r - Gamma^k d_k|x|.
template <int N>
Mat<N> radius_hessian(const Vec<N>& x, const Christoffel<N>& gamma) {
  const double r = x.norm();
  const Vec<N> drho = x / r;
  Mat<N> hess = (Mat<N>::Identity() - drho * drho.transpose()) / r;
  for (int k = 0; k < N; ++k) hess -= drho[k] * gamma[k];
  return hess;
}

}  // namespace detail

template <int N>
BoundaryFrame<N> boundary_frame(const CurvaturePack<N>& c, const Vec<N>& y) {
  if (std::abs(y[0]) > 1e-12 * std::max(1.0, y.norm())) {
    throw ParameterError("boundary_frame: point must satisfy x1 = 0");
  }
  BoundaryFrame<N> f;
  f.point = y;
  const double root = std::sqrt(c.ginv(0, 0));
  f.mu = -c.ginv.col(0) / root;
  f.A_ambient = c.gamma[0] / root;
  f.h = c.g.template bottomRightCorner<N - 1, N - 1>();
  f.A = f.A_ambient.template bottomRightCorner<N - 1, N - 1>();
  Eigen::LLT<Eigen::Matrix<double, N - 1, N - 1>> llt(f.h);
  if (llt.info() != Eigen::Success) throw GeometryError("induced boundary metric is singular");
  const Eigen::Matrix<double, N - 1, N - 1> hinv =
      llt.solve(Eigen::Matrix<double, N - 1, N - 1>::Identity());
  f.H = hinv.cwiseProduct(f.A).sum();
  return f;
}

template <int N>
BoundaryFrame<N> boundary_frame(const MetricField<N>& field, const Vec<N>& y) {
  return boundary_frame(curvature(field, y), y);
}

template <int N>
SurfaceFrame<N> surface_frame(const CurvaturePack<N>& c, const Vec<N>& x) {
  const double r = x.norm();
  if (!(r > 0.0)) throw ParameterError("surface_frame: point must be away from the origin");
  SurfaceFrame<N> f;
  f.position = x;
  const Vec<N> drho = x / r;
  const Vec<N> grad = c.ginv * drho;
  const double len = std::sqrt(drho.dot(grad));
  f.nu = grad / len;
  f.A = detail::radius_hessian<N>(x, c.gamma) / len;
  const Mat<N> proj = c.ginv - f.nu * f.nu.transpose();
  f.H = detail::projected_trace<N>(proj, f.A);
  const Mat<N> pa = proj * f.A;
  f.A_norm_sq = (pa * pa).trace();
  const auto euclid = detail::euclidean_complement<N, N - 1>({drho});
  f.measure_ratio = detail::gram_root<N, N - 1>(euclid, c.g);
  f.tangents = detail::g_orthonormalize<N, N - 1>(euclid, c.g);
  return f;
}

template <int N>
SurfaceFrame<N> surface_frame(const MetricField<N>& field, const Vec<N>& x) {
  return surface_frame(curvature(field, x), x);
}

template <int N>
EdgeFrame<N> edge_frame(const CurvaturePack<N>& c, const Vec<N>& x) {
  const double r = x.norm();
  if (std::abs(x[0]) > 1e-12 * std::max(1.0, r) || !(r > 0.0)) {
    throw ParameterError("edge_frame: point must satisfy x1 = 0 and |x| > 0");
  }
  EdgeFrame<N> f;
  f.position = x;
  const Vec<N> drho = x / r;
  const Vec<N> dx1 = Vec<N>::Unit(0);
  const Vec<N> grad_rho = c.ginv * drho;
  const Vec<N> grad_x1 = c.ginv * dx1;
  const double len_rho = std::sqrt(drho.dot(grad_rho));
  const double len_x1 = std::sqrt(c.ginv(0, 0));

  f.mu = -grad_x1 / len_x1;
  f.nu = grad_rho / len_rho;

  // vartheta = unit part of grad|x| orthogonal to mu.
  const double rho_mu = drho.dot(f.mu);  // g(grad|x|, mu)
  const Vec<N> w = grad_rho - rho_mu * f.mu;
  const double w_len = std::sqrt(w.dot(c.g * w));
  if (!(w_len > 0.0)) throw GeometryError("edge_frame: degenerate conormal");
  f.vartheta = w / w_len;
  const double theta_rho = 1.0 / w_len;
  const double theta_x1 = rho_mu / (w_len * len_x1);

  // mu' = unit part of mu orthogonal to nu.
  const double mu_nu = drho.dot(f.mu) / len_rho;  // g(mu, nu)
  const Vec<N> wp = f.mu - mu_nu * f.nu;
  const double wp_len = std::sqrt(wp.dot(c.g * wp));
  if (!(wp_len > 0.0)) throw GeometryError("edge_frame: degenerate conormal");
  f.mu_prime = wp / wp_len;
  const double mup_x1 = -1.0 / (len_x1 * wp_len);
  const double mup_rho = -mu_nu / (len_rho * wp_len);

  // Traces over T(edge) of the Hessians of the two defining functions.
  const Mat<N> proj = c.ginv - f.mu * f.mu.transpose() - f.vartheta * f.vartheta.transpose();
  const double tr_rho = detail::projected_trace<N>(proj, detail::radius_hessian<N>(x, c.gamma));
  const double tr_x1 = detail::projected_trace<N>(proj, Mat<N>(-c.gamma[0]));

  f.H_edge_in_boundary = theta_rho * tr_rho + theta_x1 * tr_x1;
  f.H_edge_in_surface = mup_rho * tr_rho + mup_x1 * tr_x1;
  f.contact_cosine = f.vartheta.dot(c.g * f.mu_prime);

  const auto euclid = detail::euclidean_complement<N, N - 2>({dx1, drho});
  f.measure_ratio = detail::gram_root<N, N - 2>(euclid, c.g);
  f.tangents = detail::g_orthonormalize<N, N - 2>(euclid, c.g);
  return f;
}

template <int N>
EdgeFrame<N> edge_frame(const MetricField<N>& field, const Vec<N>& x) {
  return edge_frame(curvature(field, x), x);
}

}  // namespace qlmass
