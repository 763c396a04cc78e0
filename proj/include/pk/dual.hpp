#pragma once

#include <array>
#include <cmath>

#include "pk/errors.hpp"

namespace pk {

inline constexpr int kMaxInnerDirs = 12;  // state + control directions
inline constexpr int kMaxOuterDirs = 6;   // unknown-parameter directions

/// Forward-mode dual scalar carrying `n` active partial-derivative
/// directions. The direction count is fixed per computation context;
/// constants enter with n = 0 and zero partials, which composes correctly
/// because unused slots are value-initialized.
///
/// Nesting DualT over Dual1 yields exact mixed second derivatives, which is
/// what parameter Jacobians of a linearization require.
template <class T, int N>
struct DualT {
  T v{};
  int n = 0;
  std::array<T, N> d{};

  DualT() = default;
  DualT(double x) : v(x) {}  // NOLINT: implicit constant lift is the point
};

using Dual1 = DualT<double, kMaxInnerDirs>;
using Dual2 = DualT<Dual1, kMaxOuterDirs>;

inline double value(double x) { return x; }
template <class T, int N>
double value(const DualT<T, N>& x) {
  return value(x.v);
}

template <class T, int N>
DualT<T, N> operator+(const DualT<T, N>& a, const DualT<T, N>& b) {
  DualT<T, N> r;
  r.v = a.v + b.v;
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}

template <class T, int N>
DualT<T, N> operator-(const DualT<T, N>& a, const DualT<T, N>& b) {
  DualT<T, N> r;
  r.v = a.v - b.v;
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}

template <class T, int N>
DualT<T, N> operator-(const DualT<T, N>& a) {
  DualT<T, N> r;
  r.v = -a.v;
  r.n = a.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = -a.d[i];
  return r;
}

template <class T, int N>
DualT<T, N> operator*(const DualT<T, N>& a, const DualT<T, N>& b) {
  DualT<T, N> r;
  r.v = a.v * b.v;
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}

template <class T, int N>
DualT<T, N> operator/(const DualT<T, N>& a, const DualT<T, N>& b) {
  DualT<T, N> r;
  r.v = a.v / b.v;
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
  return r;
}

// Mixed double forms: template deduction does not lift double implicitly.
template <class T, int N>
DualT<T, N> operator+(double a, const DualT<T, N>& b) {
  return DualT<T, N>(a) + b;
}
template <class T, int N>
DualT<T, N> operator+(const DualT<T, N>& a, double b) {
  return a + DualT<T, N>(b);
}
template <class T, int N>
DualT<T, N> operator-(double a, const DualT<T, N>& b) {
  return DualT<T, N>(a) - b;
}
template <class T, int N>
DualT<T, N> operator-(const DualT<T, N>& a, double b) {
  return a - DualT<T, N>(b);
}
template <class T, int N>
DualT<T, N> operator*(double a, const DualT<T, N>& b) {
  DualT<T, N> r;
  r.v = a * b.v;
  r.n = b.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = a * b.d[i];
  return r;
}
template <class T, int N>
DualT<T, N> operator*(const DualT<T, N>& a, double b) {
  return b * a;
}
template <class T, int N>
DualT<T, N> operator/(const DualT<T, N>& a, double b) {
  return a * (1.0 / b);
}
template <class T, int N>
DualT<T, N> operator/(double a, const DualT<T, N>& b) {
  return DualT<T, N>(a) / b;
}

template <class T, int N>
DualT<T, N> sin(const DualT<T, N>& a) {
  using std::cos;
  using std::sin;
  DualT<T, N> r;
  r.v = sin(a.v);
  r.n = a.n;
  const T c = cos(a.v);
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] * c;
  return r;
}

template <class T, int N>
DualT<T, N> cos(const DualT<T, N>& a) {
  using std::cos;
  using std::sin;
  DualT<T, N> r;
  r.v = cos(a.v);
  r.n = a.n;
  const T s = sin(a.v);
  for (int i = 0; i < r.n; ++i) r.d[i] = -(a.d[i] * s);
  return r;
}

template <class T, int N>
DualT<T, N> sqrt(const DualT<T, N>& a) {
  using std::sqrt;
  DualT<T, N> r;
  r.v = sqrt(a.v);
  r.n = a.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] / (2.0 * r.v);
  return r;
}

/// Integer/real power with fixed exponent (covers every Table-style model
/// expression; general dual exponents are not needed here).
template <class T, int N>
DualT<T, N> pow(const DualT<T, N>& a, double p) {
  using std::pow;
  DualT<T, N> r;
  r.v = pow(a.v, p);
  r.n = a.n;
  const T slope = p * pow(a.v, p - 1.0);
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] * slope;
  return r;
}

/// First-order seed: value x, active in direction `dir` of `ndirs`.
inline Dual1 dual1_active(double x, int dir, int ndirs) {
  if (ndirs > kMaxInnerDirs || dir >= ndirs)
    throw InvalidParameter("dual1_active: direction out of range");
  Dual1 r(x);
  r.n = ndirs;
  r.d[dir] = 1.0;
  return r;
}

/// Second-order seed for a state/control coordinate: inner-active only.
inline Dual2 dual2_inner(double x, int inner_dir, int inner_n, int outer_n) {
  if (outer_n > kMaxOuterDirs) throw InvalidParameter("dual2_inner: too many outer directions");
  Dual2 r;
  r.v = dual1_active(x, inner_dir, inner_n);
  r.n = outer_n;
  return r;
}

/// Second-order seed for an unknown parameter: outer-active only.
inline Dual2 dual2_outer(double x, int outer_dir, int outer_n) {
  if (outer_n > kMaxOuterDirs || outer_dir >= outer_n)
    throw InvalidParameter("dual2_outer: direction out of range");
  Dual2 r(x);
  r.n = outer_n;
  r.d[outer_dir] = Dual1(1.0);
  return r;
}

}  // namespace pk
