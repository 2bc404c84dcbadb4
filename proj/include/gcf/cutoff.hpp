#pragma once

#include <cmath>

#include "gcf/errors.hpp"

namespace gcf {

/// Lower-bound cutoff for the 1/u coefficient.
///
///   g(z) = m/4            for |z| <= m/4
///   g(z) = |z|            for |z| >= m/2
///   g(z) = m/4 + (m/4) p(s) on the transition, s = (|z| - m/4) / (m/4),
///
/// with p(s) = 6 s^3 - 8 s^4 + 3 s^5, the quintic matching value, slope and
/// curvature at both junctions. p' = s^2 (18 - 32 s + 15 s^2) > 0 on (0, 1], so
/// g is nondecreasing on [0, inf) and g >= m/4 everywhere.
struct CutoffSpec {
  double m;

  explicit CutoffSpec(double lower_bound) : m(lower_bound) {
    if (!(lower_bound > 0.0) || !std::isfinite(lower_bound)) {
      throw ValidationError("cutoff lower bound: m must be finite and > 0");
    }
  }

  double floor() const { return 0.25 * m; }
  double identity_start() const { return 0.5 * m; }
  /// True when g(z) != z, i.e. the cutoff actually modifies the coefficient.
  bool modifies(double z) const { return z < identity_start(); }
};

namespace detail {
inline double transition_poly(double s) { return s * s * s * (6.0 + s * (-8.0 + 3.0 * s)); }
inline double transition_poly_d1(double s) { return s * s * (18.0 + s * (-32.0 + 15.0 * s)); }
}  // namespace detail

inline double cutoff_g(double z, const CutoffSpec& spec) {
  if (z >= spec.identity_start()) return z;
  const double a = std::abs(z);
  if (a >= spec.identity_start()) return a;
  const double lo = spec.floor();
  if (a <= lo) return lo;
  const double width = spec.identity_start() - lo;
  return lo + width * detail::transition_poly((a - lo) / width);
}

inline double cutoff_g_prime(double z, const CutoffSpec& spec) {
  const double a = std::abs(z);
  const double sign = z < 0.0 ? -1.0 : 1.0;
  if (a >= spec.identity_start()) return sign;
  const double lo = spec.floor();
  if (a <= lo) return 0.0;
  const double width = spec.identity_start() - lo;
  return sign * detail::transition_poly_d1((a - lo) / width);
}

}  // namespace gcf
