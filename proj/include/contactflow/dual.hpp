#pragma once

#include <array>
#include <cmath>
#include <span>
#include <type_traits>
#include <vector>

namespace contactflow {

/// Hard cap on chart dimension.  Keeps dual numbers allocation-free: every
/// gradient lives in a fixed-size array on the stack.
inline constexpr int kMaxDim = 8;

/// Forward-mode dual number over scalar T, carrying up to kMaxDim partials.
/// Nesting, as in Dual<Dual<double>>, propagates exact second derivatives.
/// A value constructed from a plain number has n == 0 and acts as a constant;
/// missing partial slots read as zero so mixed-width arithmetic is safe.
template <class T>
struct Dual {
  T v{};
  int n = 0;
  std::array<T, kMaxDim> d{};

  Dual() = default;
  Dual(const T& value) : v(value) {}
  template <class U = T, class = std::enable_if_t<!std::is_same_v<U, double>>>
  Dual(double value) : v(value) {}

  T part(int i) const { return i < n ? d[i] : T{}; }

  friend Dual operator+(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v + b.v;
    r.n = a.n > b.n ? a.n : b.n;
    for (int i = 0; i < r.n; ++i) r.d[i] = a.part(i) + b.part(i);
    return r;
  }
  friend Dual operator-(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v - b.v;
    r.n = a.n > b.n ? a.n : b.n;
    for (int i = 0; i < r.n; ++i) r.d[i] = a.part(i) - b.part(i);
    return r;
  }
  friend Dual operator-(const Dual& a) {
    Dual r;
    r.v = -a.v;
    r.n = a.n;
    for (int i = 0; i < r.n; ++i) r.d[i] = -a.d[i];
    return r;
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v * b.v;
    r.n = a.n > b.n ? a.n : b.n;
    for (int i = 0; i < r.n; ++i) r.d[i] = a.part(i) * b.v + a.v * b.part(i);
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v / b.v;
    r.n = a.n > b.n ? a.n : b.n;
    // (a'b - ab')/b^2 rewritten through the already-computed quotient.
    for (int i = 0; i < r.n; ++i) r.d[i] = (a.part(i) - r.v * b.part(i)) / b.v;
    return r;
  }
  Dual& operator+=(const Dual& b) { *this = *this + b; return *this; }
  Dual& operator-=(const Dual& b) { *this = *this - b; return *this; }
  Dual& operator*=(const Dual& b) { *this = *this * b; return *this; }
  Dual& operator/=(const Dual& b) { *this = *this / b; return *this; }
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual1>;

/// Numeric value stripped of all derivative content.
inline double valueOf(double x) { return x; }
template <class T>
double valueOf(const Dual<T>& x) { return valueOf(x.v); }

inline bool isFiniteDeep(double x) { return std::isfinite(x); }
template <class T>
bool isFiniteDeep(const Dual<T>& x) {
  if (!isFiniteDeep(x.v)) return false;
  for (int i = 0; i < x.n; ++i)
    if (!isFiniteDeep(x.d[i])) return false;
  return true;
}

/// Zero including every derivative part (a structural zero, safe to skip work on).
inline bool isZeroDeep(double x) { return x == 0.0; }
template <class T>
bool isZeroDeep(const Dual<T>& x) {
  if (!isZeroDeep(x.v)) return false;
  for (int i = 0; i < x.n; ++i)
    if (!isZeroDeep(x.d[i])) return false;
  return true;
}

namespace detail {
// Chain rule for an elementary function: given f(v) and f'(v).
template <class T>
Dual<T> lift(const Dual<T>& x, T fv, T fp) {
  Dual<T> r;
  r.v = fv;
  r.n = x.n;
  for (int i = 0; i < x.n; ++i) r.d[i] = fp * x.d[i];
  return r;
}
}  // namespace detail

template <class T>
Dual<T> sin(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return detail::lift(x, T(sin(x.v)), T(cos(x.v)));
}
template <class T>
Dual<T> cos(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return detail::lift(x, T(cos(x.v)), T(-sin(x.v)));
}
template <class T>
Dual<T> tan(const Dual<T>& x) {
  using std::tan;
  T t = T(tan(x.v));
  return detail::lift(x, t, T(1.0) + t * t);
}
template <class T>
Dual<T> exp(const Dual<T>& x) {
  using std::exp;
  T e = T(exp(x.v));
  return detail::lift(x, e, e);
}
template <class T>
Dual<T> log(const Dual<T>& x) {
  using std::log;
  return detail::lift(x, T(log(x.v)), T(1.0) / x.v);
}
template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  using std::sqrt;
  T s = T(sqrt(x.v));
  return detail::lift(x, s, T(0.5) / s);
}

/// Integer power by repeated squaring; valid for any base sign.
template <class S>
S powInt(const S& base, long long e) {
  if (e < 0) return S(1.0) / powInt(base, -e);
  S acc(1.0);
  S b = base;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}
inline double powInt(double base, long long e) {
  if (e < 0) return 1.0 / powInt(base, -e);
  double acc = 1.0, b = base;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

/// Seed a point for one differentiation level: coordinate i gets unit
/// partial i.  Applying this to already-dual coordinates yields nested duals.
template <class S>
std::vector<Dual<S>> seedGradient(std::span<const S> x) {
  std::vector<Dual<S>> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    out[i].v = x[i];
    out[i].n = static_cast<int>(x.size());
    out[i].d[i] = S(1.0);
  }
  return out;
}

}  // namespace contactflow
