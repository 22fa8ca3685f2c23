#pragma once

// Second-order forward-mode differentiation in N variables. A Taylor2 value
// carries f, grad f and the (symmetric) Hessian of f at a point, so metric
// components written once as generic expressions yield exact jets.

#include <array>
#include <cmath>

namespace qlmass {

template <int N>
struct Taylor2 {
  double v = 0.0;
  std::array<double, N> d{};
  std::array<double, N * N> h{};

  Taylor2() = default;
  Taylor2(double value) : v(value) {}  // NOLINT: constants promote implicitly

  static Taylor2 variable(int k, double value) {
    Taylor2 t(value);
    t.d[k] = 1.0;
    return t;
  }

  double hess(int i, int j) const { return h[i * N + j]; }

  Taylor2& operator+=(const Taylor2& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    for (int i = 0; i < N * N; ++i) h[i] += o.h[i];
    return *this;
  }
  Taylor2& operator-=(const Taylor2& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    for (int i = 0; i < N * N; ++i) h[i] -= o.h[i];
    return *this;
  }
  Taylor2& operator*=(double s) {
    v *= s;
    for (auto& x : d) x *= s;
    for (auto& x : h) x *= s;
    return *this;
  }
};

template <int N>
Taylor2<N> operator-(Taylor2<N> a) {
  a *= -1.0;
  return a;
}
template <int N>
Taylor2<N> operator+(Taylor2<N> a, const Taylor2<N>& b) {
  return a += b;
}
template <int N>
Taylor2<N> operator-(Taylor2<N> a, const Taylor2<N>& b) {
  return a -= b;
}
template <int N>
Taylor2<N> operator+(Taylor2<N> a, double b) {
  a.v += b;
  return a;
}
template <int N>
Taylor2<N> operator+(double b, Taylor2<N> a) {
  a.v += b;
  return a;
}
template <int N>
Taylor2<N> operator-(Taylor2<N> a, double b) {
  a.v -= b;
  return a;
}
template <int N>
Taylor2<N> operator-(double b, Taylor2<N> a) {
  a *= -1.0;
  a.v += b;
  return a;
}
template <int N>
Taylor2<N> operator*(Taylor2<N> a, double s) {
  return a *= s;
}
template <int N>
Taylor2<N> operator*(double s, Taylor2<N> a) {
  return a *= s;
}
template <int N>
Taylor2<N> operator*(const Taylor2<N>& a, const Taylor2<N>& b) {
  Taylor2<N> r(a.v * b.v);
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      r.h[i * N + j] = a.h[i * N + j] * b.v + a.d[i] * b.d[j] + a.d[j] * b.d[i] +
                       a.v * b.h[i * N + j];
    }
  }
  return r;
}

/// Applies a scalar function with value f0 and derivatives f1, f2 at a.v.
template <int N>
Taylor2<N> chain(const Taylor2<N>& a, double f0, double f1, double f2) {
  Taylor2<N> r(f0);
  for (int i = 0; i < N; ++i) r.d[i] = f1 * a.d[i];
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      r.h[i * N + j] = f1 * a.h[i * N + j] + f2 * a.d[i] * a.d[j];
    }
  }
  return r;
}

template <int N>
Taylor2<N> operator/(const Taylor2<N>& a, const Taylor2<N>& b) {
  const double inv = 1.0 / b.v;
  return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}
template <int N>
Taylor2<N> operator/(const Taylor2<N>& a, double s) {
  return a * (1.0 / s);
}
template <int N>
Taylor2<N> operator/(double s, const Taylor2<N>& b) {
  const double inv = 1.0 / b.v;
  return chain(b, s * inv, -s * inv * inv, 2.0 * s * inv * inv * inv);
}

template <int N>
Taylor2<N> sqrt(const Taylor2<N>& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

template <int N>
Taylor2<N> pow(const Taylor2<N>& a, double p) {
  const double f0 = std::pow(a.v, p);
  return chain(a, f0, p * f0 / a.v, p * (p - 1.0) * f0 / (a.v * a.v));
}

template <int N>
Taylor2<N> exp(const Taylor2<N>& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

template <int N>
double value_of(const Taylor2<N>& a) {
  return a.v;
}
inline double value_of(double a) { return a; }

}  // namespace qlmass
