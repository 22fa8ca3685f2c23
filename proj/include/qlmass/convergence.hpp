#pragma once

// Limit and rate estimation for sequences m(r) = m_inf + C r^{-p} + ...

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qlmass/common.hpp"

namespace qlmass {

struct FitRow {
  double r;
  double value;
  double deviation;  // value - limit
};

struct ConvergenceFit {
  double limit = 0.0;
  /// Least-squares slope of log|m - m_inf| against log r, negated.
  double rate = 0.0;
  /// Exponent from the three-point extrapolation.
  double richardson_rate = 0.0;
  double uncertainty = 0.0;
  /// RMS residual of the log-log fit.
  double residual_norm = 0.0;
  bool below_noise_floor = false;
  bool non_monotone_tail = false;
  std::vector<FitRow> table;

  std::string flags() const {
    std::string f;
    if (below_noise_floor) f += "below-noise-floor";
    if (non_monotone_tail) f += std::string(f.empty() ? "" : ",") + "non-monotone-tail";
    return f;
  }
};

namespace detail {

struct Extrapolation {
  double limit;
  double rate;
  bool ok;
};

/// Fits m_inf + C r^{-p} through three points. p is found by bisection on
/// (m1 - m2) / (m2 - m3) = (r1^-p - r2^-p) / (r2^-p - r3^-p).
inline Extrapolation three_point(double r1, double m1, double r2, double m2, double r3, double m3) {
  const double d12 = m1 - m2;
  const double d23 = m2 - m3;
  if (d23 == 0.0 || d12 == 0.0 || (d12 > 0) != (d23 > 0)) return {m3, 0.0, false};
  const double target = d12 / d23;
  auto ratio = [&](double p) {
    return (std::pow(r1, -p) - std::pow(r2, -p)) / (std::pow(r2, -p) - std::pow(r3, -p));
  };
  // ratio(p) increases with p; its p -> 0 limit is log(r2/r1) / log(r3/r2).
  double lo = 1e-6, hi = 40.0;
  if (target <= ratio(lo) || target >= ratio(hi)) return {m3, 0.0, false};
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ratio(mid) < target ? lo : hi) = mid;
  }
  const double p = 0.5 * (lo + hi);
  const double c = d23 / (std::pow(r2, -p) - std::pow(r3, -p));
  return {m3 - c * std::pow(r3, -p), p, true};
}

}  // namespace detail

/// Least-squares slope of log y against log x, with the RMS residual.
inline std::pair<double, double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("loglog_slope: need two or more points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ParameterError("loglog_slope: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sx += lx[i], sy += ly[i];
  sx /= lx.size();
  sy /= lx.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - sx) * (lx[i] - sx);
    sxy += (lx[i] - sx) * (ly[i] - sy);
  }
  const double slope = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double res = ly[i] - (sy + slope * (lx[i] - sx));
    rss += res * res;
  }
  return {slope, std::sqrt(rss / lx.size())};
}

/// Estimates lim m(r) from a table sorted by increasing r.
/// noise_floor is the absolute size below which differences count as
/// quadrature noise; zero selects 1e-11 * max(1, max|m|).
inline ConvergenceFit rate_fit(const std::vector<double>& r, const std::vector<double>& m, double noise_floor = 0.0) {
  if (r.size() != m.size()) throw ParameterError("rate_fit: radius and value columns differ in length");
  if (r.size() < 3) throw ParameterError("rate_fit: need at least 3 radii");
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) throw ParameterError("rate_fit: radii must be strictly increasing");
  }
  double scale = 1.0;
  for (double v : m) scale = std::max(scale, std::abs(v));
  const double noise = noise_floor > 0.0 ? noise_floor : 1e-11 * scale;
  const std::size_t k = r.size();

  ConvergenceFit fit;
  double spread = 0.0;
  for (std::size_t i = 0; i < k; ++i) spread = std::max(spread, std::abs(m[i] - m[k - 1]));
  if (spread <= noise) {
    fit.limit = m[k - 1];
    fit.rate = 0.0;
    fit.uncertainty = noise;
    fit.below_noise_floor = true;
  } else {
    const auto e = detail::three_point(r[k - 3], m[k - 3], r[k - 2], m[k - 2], r[k - 1], m[k - 1]);
    fit.limit = e.limit;
    fit.richardson_rate = e.rate;
    // Monotone, same-signed differences are required for the model to apply.
    for (std::size_t i = 1; i + 1 < k; ++i) {
      const double a = m[i] - m[i - 1], b = m[i + 1] - m[i];
      if (std::abs(a) > noise && std::abs(b) > noise && (a > 0) != (b > 0)) fit.non_monotone_tail = true;
    }
    if (!e.ok) fit.non_monotone_tail = true;

    fit.uncertainty = std::abs(m[k - 1] - fit.limit) + noise;
    if (k >= 4 && e.ok) {
      const auto prev = detail::three_point(r[k - 4], m[k - 4], r[k - 3], m[k - 3], r[k - 2], m[k - 2]);
      if (prev.ok) fit.uncertainty = 2.0 * std::abs(fit.limit - prev.limit) + noise;
    }

    // Log-log least squares on points clearly above the noise.
    std::vector<double> rs, ds;
    for (std::size_t i = 0; i < k; ++i) {
      const double d = std::abs(m[i] - fit.limit);
      if (d > std::max(noise, fit.uncertainty)) {
        rs.push_back(r[i]);
        ds.push_back(d);
      }
    }
    if (rs.size() >= 2) {
      const auto [slope, rms] = loglog_slope(rs, ds);
      fit.rate = -slope;
      fit.residual_norm = rms;
    } else {
      fit.rate = e.rate;
    }
  }
  for (std::size_t i = 0; i < k; ++i) fit.table.push_back({r[i], m[i], m[i] - fit.limit});
  return fit;
}

}  // namespace qlmass
