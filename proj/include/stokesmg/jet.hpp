#pragma once

// Forward-mode Taylor arithmetic used to differentiate the closed-form
// geometry maps and manufactured fields.
//
// Jet carries a value with its gradient and Hessian in up to three
// variables. Dual<T> adds one first-order direction on top of any scalar
// type, so Dual<Jet> yields third derivatives of a map (the Hessian of its
// Jacobian) from the same templated source.

#include <Eigen/Dense>

#include <cmath>
#include <type_traits>

namespace stokesmg {

struct Jet {
  double v = 0.0;
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)

  static Jet variable(double value, int k) {
    Jet j(value);
    j.g[k] = 1.0;
    return j;
  }

  /// Applies a scalar function given its value and first two derivatives.
  Jet chain(double f0, double f1, double f2) const {
    Jet r;
    r.v = f0;
    r.g = f1 * g;
    r.h = f1 * h + f2 * (g * g.transpose());
    return r;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    g += o.g;
    h += o.h;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    g -= o.g;
    h -= o.h;
    return *this;
  }
};

inline Jet operator-(const Jet& a) {
  Jet r;
  r.v = -a.v;
  r.g = -a.g;
  r.h = -a.h;
  return r;
}
inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  r.g = a.v * b.g + b.v * a.g;
  r.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}
inline Jet operator*(const Jet& a, double s) {
  Jet r;
  r.v = a.v * s;
  r.g = a.g * s;
  r.h = a.h * s;
  return r;
}
inline Jet operator*(double s, const Jet& a) { return a * s; }
inline Jet operator+(const Jet& a, double s) {
  Jet r = a;
  r.v += s;
  return r;
}
inline Jet operator+(double s, const Jet& a) { return a + s; }
inline Jet operator-(const Jet& a, double s) { return a + (-s); }
inline Jet operator-(double s, const Jet& a) { return (-a) + s; }
inline Jet reciprocal(const Jet& a) {
  const double inv = 1.0 / a.v;
  return a.chain(inv, -inv * inv, 2.0 * inv * inv * inv);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
inline Jet operator/(double s, const Jet& a) { return s * reciprocal(a); }

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return a.chain(e, e, e);
}
inline Jet sin(const Jet& a) { return a.chain(std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return a.chain(std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return a.chain(s, 0.5 / s, -0.25 / (s * a.v));
}

template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  Dual(const T& value) : v(value), d(0.0) {}  // NOLINT(google-explicit-constructor)
  Dual(const T& value, const T& slope) : v(value), d(slope) {}
  Dual(double value)  // NOLINT(google-explicit-constructor)
    requires(!std::is_same_v<T, double>)
      : v(value), d(0.0) {}
};

template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.v * b.d + a.d * b.v};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  const T inv = 1.0 / b.v;
  return {a.v * inv, (a.d * b.v - a.v * b.d) * inv * inv};
}
template <class T>
Dual<T> operator+(const Dual<T>& a, double s) {
  return {a.v + s, a.d};
}
template <class T>
Dual<T> operator+(double s, const Dual<T>& a) {
  return a + s;
}
template <class T>
Dual<T> operator-(const Dual<T>& a, double s) {
  return {a.v - s, a.d};
}
template <class T>
Dual<T> operator-(double s, const Dual<T>& a) {
  return {s - a.v, -a.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double s) {
  return {a.v * s, a.d * s};
}
template <class T>
Dual<T> operator*(double s, const Dual<T>& a) {
  return a * s;
}
template <class T>
Dual<T> operator/(const Dual<T>& a, double s) {
  return a * (1.0 / s);
}
template <class T>
Dual<T> operator/(double s, const Dual<T>& a) {
  return Dual<T>(T(s)) / a;
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  const T e = exp(a.v);
  return {e, e * a.d};
}
template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.v), cos(a.v) * a.d};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.v), -(sin(a.v) * a.d)};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  const T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}

}  // namespace stokesmg
