#pragma once

// Forward-mode dual numbers. `value` carries f(x), `deriv` carries f'(x) along
// the seeded direction. The inner type may be any backend scalar, so
// Dual<double>, Dual<Complex> and Dual<Rational> all work.

#include "hardcore/arith.hpp"

#include <ostream>

namespace hardcore {

template <class T>
struct Dual {
  T value{};
  T deriv{};

  constexpr Dual() = default;
  template <class U>
    requires std::is_arithmetic_v<U>
  constexpr Dual(U x) : value(static_cast<T>(x)), deriv(0) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(const T& v) : value(v), deriv(0) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(const T& v, const T& d) : value(v), deriv(d) {}

  /// Independent variable: derivative seed 1.
  static constexpr Dual variable(const T& v) { return {v, T(1)}; }

  Dual& operator+=(const Dual& o) {
    value += o.value;
    deriv += o.deriv;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value -= o.value;
    deriv -= o.deriv;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    deriv = deriv * o.value + value * o.deriv;
    value *= o.value;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const T inv = T(1) / o.value;
    value *= inv;
    deriv = (deriv - value * o.deriv) * inv;
    return *this;
  }
};

template <class T>
Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T>
Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T>
Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T>
Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }
template <class T>
Dual<T> operator-(const Dual<T>& a) { return {-a.value, -a.deriv}; }

template <class T>
Dual<T> operator+(Dual<T> a, const T& b) { a.value += b; return a; }
template <class T>
Dual<T> operator+(const T& a, Dual<T> b) { b.value += a; return b; }
template <class T>
Dual<T> operator-(Dual<T> a, const T& b) { a.value -= b; return a; }
template <class T>
Dual<T> operator-(const T& a, const Dual<T>& b) { return {a - b.value, -b.deriv}; }
template <class T>
Dual<T> operator*(Dual<T> a, const T& b) { a.value *= b; a.deriv *= b; return a; }
template <class T>
Dual<T> operator*(const T& a, Dual<T> b) { b.value *= a; b.deriv *= a; return b; }
template <class T>
Dual<T> operator/(Dual<T> a, const T& b) { a.value /= b; a.deriv /= b; return a; }
template <class T>
Dual<T> operator/(const T& a, const Dual<T>& b) { return Dual<T>(a) / b; }

/// Equality compares both components; use is_zero() for a value-only test.
template <class T>
bool operator==(const Dual<T>& a, const Dual<T>& b) {
  return a.value == b.value && a.deriv == b.deriv;
}

template <class T>
bool is_zero(const Dual<T>& x) {
  return is_zero(x.value);
}

template <class T>
struct scalar_traits<Dual<T>> {
  static constexpr bool exact = scalar_traits<T>::exact;
  static constexpr bool real = scalar_traits<T>::real;
  static double magnitude(const Dual<T>& x) { return scalar_traits<T>::magnitude(x.value); }
  static std::complex<double> to_complex(const Dual<T>& x) { return scalar_traits<T>::to_complex(x.value); }
};

template <class T>
std::ostream& operator<<(std::ostream& os, const Dual<T>& x) {
  return os << '(' << x.value << " + " << x.deriv << "e)";
}

/// Evaluate f and f' at x in one forward pass.
template <class T, class F>
auto differentiate(F&& f, const T& x) {
  const Dual<T> y = f(Dual<T>::variable(x));
  return std::pair<T, T>{y.value, y.deriv};
}

}  // namespace hardcore
