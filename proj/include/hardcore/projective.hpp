#pragma once

// Points of the extended complex plane as (num : den) pairs. Occupation
// ratios are carried in this form so that pinned-IN vertices (ratio infinity)
// and their images under z -> lambda / (1 + z) need no special cases.

#include "hardcore/arith.hpp"
#include "hardcore/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hardcore {

template <class T>
class ProjectiveRatio {
 public:
  ProjectiveRatio() : num_(0), den_(1) {}
  ProjectiveRatio(T num, T den) : num_(std::move(num)), den_(std::move(den)) {
    if (is_zero(num_) && is_zero(den_)) throw ValidationError("projective ratio (0 : 0) is undefined");
  }

  static ProjectiveRatio finite(T value) { return {std::move(value), T(1)}; }
  static ProjectiveRatio infinity() { return {T(1), T(0)}; }

  const T& num() const { return num_; }
  const T& den() const { return den_; }

  bool is_infinite() const { return is_zero(den_); }

  /// num/den; only meaningful when !is_infinite().
  T value() const { return num_ / den_; }

  /// Projective equality: num * o.den == o.num * den. Exact for exact backends.
  bool equals(const ProjectiveRatio& o) const { return num_ * o.den_ == o.num_ * den_; }

  /// Chordal distance on the Riemann sphere, in [0, 1].
  double chordal_distance(const ProjectiveRatio& o) const {
    const auto a = to_complex(num_), b = to_complex(den_);
    const auto c = to_complex(o.num_), d = to_complex(o.den_);
    const double cross = std::abs(a * d - c * b);
    const double na = std::sqrt(std::norm(a) + std::norm(b));
    const double nb = std::sqrt(std::norm(c) + std::norm(d));
    return cross / (na * nb);
  }

  /// Rescales the pair so its entries stay bounded. Exact backends are brought
  /// to (value : 1) or (1 : 0); floating backends are divided by their largest
  /// magnitude. Either way the represented point is unchanged.
  ProjectiveRatio& normalize() {
    if constexpr (is_exact_v<T>) {
      if (is_zero(den_)) {
        num_ = T(1);
      } else {
        num_ = num_ / den_;
        den_ = T(1);
      }
    } else {
      const double scale = std::max(magnitude(num_), magnitude(den_));
      if (scale > 0.0 && std::isfinite(scale) && (scale > 1e32 || scale < 1e-32)) {
        const T inv = from_double<T>(1.0 / scale);
        num_ = num_ * inv;
        den_ = den_ * inv;
      }
    }
    return *this;
  }

 private:
  T num_;
  T den_;
};

/// z -> fugacity / (1 + z), the single-child tree recursion step.
template <class T>
ProjectiveRatio<T> mobius_step(const T& fugacity, const ProjectiveRatio<T>& z) {
  ProjectiveRatio<T> out(fugacity * z.den(), z.den() + z.num());
  return out.normalize();
}

}  // namespace hardcore
