#pragma once

// Arithmetic backends shared by every module. Algorithms are templated on a
// scalar type T that supports + - * / and construction from int; the traits
// below supply the few extra operations they need (zero tests, magnitudes for
// rescaling projective pairs, conversion for reporting).

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <type_traits>

namespace hardcore {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;
using Complex = std::complex<double>;

template <class T>
struct scalar_traits {
  static constexpr bool exact = false;
  static constexpr bool real = true;
  static double magnitude(const T& x) { return std::abs(static_cast<double>(x)); }
  static std::complex<double> to_complex(const T& x) { return {static_cast<double>(x), 0.0}; }
};

template <class R>
struct scalar_traits<std::complex<R>> {
  static constexpr bool exact = false;
  static constexpr bool real = false;
  static double magnitude(const std::complex<R>& x) { return static_cast<double>(std::abs(x)); }
  static std::complex<double> to_complex(const std::complex<R>& x) {
    return {static_cast<double>(x.real()), static_cast<double>(x.imag())};
  }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr bool real = true;
  static double magnitude(const Rational& x) { return boost::multiprecision::abs(x).convert_to<double>(); }
  static std::complex<double> to_complex(const Rational& x) { return {x.convert_to<double>(), 0.0}; }
};

template <class T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

template <class T>
inline constexpr bool is_real_v = scalar_traits<T>::real;

template <class T>
double magnitude(const T& x) {
  return scalar_traits<T>::magnitude(x);
}

template <class T>
bool is_zero(const T& x) {
  return x == T(0);
}

template <class T>
std::complex<double> to_complex(const T& x) {
  return scalar_traits<T>::to_complex(x);
}

/// Real value of a real backend scalar as double.
template <class T>
double to_double(const T& x) {
  return to_complex(x).real();
}

/// Exact conversion of a double into a backend scalar.
template <class T>
T from_double(double x) {
  if constexpr (std::is_same_v<T, Rational>) {
    return Rational(x);
  } else {
    return T(x);
  }
}

/// Integer power by repeated squaring, usable with any backend.
template <class T>
T ipow(T base, unsigned exponent) {
  T result(1);
  while (exponent != 0) {
    if (exponent & 1U) result = result * base;
    exponent >>= 1U;
    if (exponent != 0) base = base * base;
  }
  return result;
}

}  // namespace hardcore
