#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qlmass {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

template <int N>
using Mat = Eigen::Matrix<double, N, N>;

/// Raised when a point lies outside the region where a metric family is
/// defined (x1 < 0, or inside an excluded core).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for invalid family parameters, quadrature parameters, or run
/// configuration values.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a geometric construction degenerates (singular metric,
/// degenerate tangent basis, non-finite integrand).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Volume of the unit (k)-sphere S^k in R^{k+1}.
inline double unit_sphere_volume(int k) {
  // |S^k| = 2 pi^{(k+1)/2} / Gamma((k+1)/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

/// Euclidean area of the coordinate hemisphere of radius r in R^n_+.
inline double euclidean_hemisphere_area(int n, double r) {
  return 0.5 * unit_sphere_volume(n - 1) * std::pow(r, n - 1);
}

/// Euclidean volume of the half ball of radius r in R^n_+.
inline double euclidean_half_ball_volume(int n, double r) {
  return euclidean_hemisphere_area(n, r) * r / n;
}

/// Neumaier-compensated accumulator. Results depend only on the order in
/// which terms are added.
class CompensatedSum {
 public:
  void add(double term) {
    const double t = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      carry_ += (sum_ - t) + term;
    } else {
      carry_ += (term - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double term) {
    add(term);
    return *this;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace qlmass
