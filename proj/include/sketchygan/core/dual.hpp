/*
 * Copyright 2026 The SketchyGAN-desk Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <type_traits>

namespace sketchygan {

/*
 * First-order dual number v + d*eps with eps^2 = 0.
 *
 * Running the reverse-mode tape over Dual<T> scalars yields gradients whose
 * tangent part is a Hessian-vector product (forward-over-reverse). This is how
 * the gradient penalty obtains exact second-order parameter gradients.
 * Comparisons only look at the primal value.
 */
template <typename T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(T value) : v(value), d(0) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(T value, T tangent) : v(value), d(tangent) {}

  constexpr Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    v -= o.v;
    d -= o.d;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v *= o.v;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    d = (d * o.v - v * o.d) / (o.v * o.v);
    v /= o.v;
    return *this;
  }

  friend constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend constexpr Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend constexpr Dual operator/(Dual a, const Dual& b) { return a /= b; }
  friend constexpr Dual operator-(const Dual& a) { return {-a.v, -a.d}; }

  friend constexpr bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
  friend constexpr bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
  friend constexpr bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
  friend constexpr bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }
  friend constexpr bool operator==(const Dual& a, const Dual& b) { return a.v == b.v; }
  friend constexpr bool operator!=(const Dual& a, const Dual& b) { return a.v != b.v; }

  friend Dual exp(const Dual& a) {
    const T e = std::exp(a.v);
    return {e, e * a.d};
  }
  friend Dual log(const Dual& a) { return {std::log(a.v), a.d / a.v}; }
  friend Dual log1p(const Dual& a) { return {std::log1p(a.v), a.d / (T(1) + a.v)}; }
  friend Dual sqrt(const Dual& a) {
    const T s = std::sqrt(a.v);
    return {s, s > T(0) ? a.d / (T(2) * s) : T(0)};
  }
  friend Dual tanh(const Dual& a) {
    const T t = std::tanh(a.v);
    return {t, (T(1) - t * t) * a.d};
  }
  friend Dual abs(const Dual& a) { return a.v < T(0) ? -a : a; }
  friend Dual pow(const Dual& a, T p) {
    if (p == T(0)) return {T(1), T(0)};
    const T base = std::pow(a.v, p);
    const T slope = a.v == T(0) ? T(0) : p * std::pow(a.v, p - T(1));
    return {base, slope * a.d};
  }
  friend bool isfinite(const Dual& a) { return std::isfinite(a.v) && std::isfinite(a.d); }
};

template <typename T>
struct is_dual : std::false_type {};
template <typename T>
struct is_dual<Dual<T>> : std::true_type {};
template <typename T>
inline constexpr bool is_dual_v = is_dual<T>::value;

/// Underlying real type: T for plain scalars, R for Dual<R>.
template <typename T>
struct real_of {
  using type = T;
};
template <typename T>
struct real_of<Dual<T>> {
  using type = T;
};
template <typename T>
using real_of_t = typename real_of<T>::type;

template <typename T>
constexpr real_of_t<T> primal(const T& x) {
  if constexpr (is_dual_v<T>) {
    return x.v;
  } else {
    return x;
  }
}

template <typename T>
constexpr real_of_t<T> tangent(const T& x) {
  if constexpr (is_dual_v<T>) {
    return x.d;
  } else {
    return real_of_t<T>(0);
  }
}

/// Converts between the supported scalar types; dropping to a plain type keeps
/// the primal value, lifting to a dual gives a zero tangent.
template <typename To, typename From>
constexpr To scalar_cast(const From& x) {
  if constexpr (is_dual_v<To> && is_dual_v<From>) {
    return To(static_cast<real_of_t<To>>(x.v), static_cast<real_of_t<To>>(x.d));
  } else if constexpr (is_dual_v<To>) {
    return To(static_cast<real_of_t<To>>(x));
  } else {
    return static_cast<To>(primal(x));
  }
}

template <typename T>
bool is_finite(const T& x) {
  using std::isfinite;
  return isfinite(x);
}

}  // namespace sketchygan
