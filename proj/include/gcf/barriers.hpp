#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "gcf/errors.hpp"

namespace gcf {

// ---------------------------------------------------------------------------
// Cosh supersolution  v = M + 2 (a / cosh R) e^{lambda t} cosh x
// ---------------------------------------------------------------------------

struct CoshBarrier {
  double M;
  double a;
  double R;
  double lambda;

  /// Throws unless a >= 0, R > 0 and lambda > 4/m.
  void validate(double m) const {
    if (!(a >= 0.0)) throw ValidationError("cosh barrier: a must be >= 0");
    if (!(R > 0.0)) throw ValidationError("cosh barrier: R must be > 0");
    if (!(lambda > 4.0 / m)) throw ValidationError("cosh barrier: lambda must exceed 4/m");
  }
};

/// lambda = (4/m)(1 + margin); margin must be strictly positive.
inline double choose_lambda(double m, double margin) {
  if (!(m > 0.0)) throw ValidationError("choose_lambda: m must be > 0");
  if (!(margin > 0.0)) throw ValidationError("choose_lambda: lambda must strictly exceed 4/m");
  return 4.0 / m * (1.0 + margin);
}

namespace detail {
// cosh(x) / cosh(R) without overflow for large |x|, R.
inline double cosh_ratio(double x, double R) {
  const double ax = std::abs(x), ar = std::abs(R);
  return std::exp(ax - ar) * (1.0 + std::exp(-2.0 * ax)) / (1.0 + std::exp(-2.0 * ar));
}
inline double sinh_cosh_ratio(double x, double R) {
  const double ax = std::abs(x), ar = std::abs(R);
  const double mag = std::exp(ax - ar) * (1.0 - std::exp(-2.0 * ax)) / (1.0 + std::exp(-2.0 * ar));
  return x < 0.0 ? -mag : mag;
}
}  // namespace detail

/// The e^{lambda t} cosh x part, 2 (a / cosh R) e^{lambda t} cosh x, and its
/// closed-form derivatives.
struct CoshTail {
  double a;
  double R;
  double lambda;

  double value(double x, double t) const {
    return 2.0 * a * std::exp(lambda * t) * detail::cosh_ratio(x, R);
  }
  double dt(double x, double t) const { return lambda * value(x, t); }
  double dx(double x, double t) const {
    return 2.0 * a * std::exp(lambda * t) * detail::sinh_cosh_ratio(x, R);
  }
  double dxx(double x, double t) const { return value(x, t); }
};

inline double cosh_barrier_value(const CoshBarrier& b, double x, double t) {
  return b.M + CoshTail{b.a, b.R, b.lambda}.value(x, t);
}

// ---------------------------------------------------------------------------
// Gaussian decay supersolution
//   v = c + eps + eps t/(t+1) + h e^{-w x^2}   [+ cosh tail]
// ---------------------------------------------------------------------------

struct BumpCurvaturePeak {
  double location;
  double value;
};

/// Maximum of d^2/dx^2 (h e^{-w x^2}): attained at x = +-sqrt(3/(2w)),
/// value 4 h w e^{-3/2}.
inline BumpCurvaturePeak gaussian_bump_d2_max(double h, double w) {
  if (!(h > 0.0) || !(w > 0.0)) throw ValidationError("gaussian bump: h and w must be > 0");
  return {std::sqrt(3.0 / (2.0 * w)), 4.0 * h * w * std::exp(-1.5)};
}

struct DecayParams {
  double h;
  double w;
  double w_bound;  // strict upper limit on w from the supersolution inequality
};

/// h = 2 M e^{R0^2}; w = 0.5 min(1, w_bound) with
/// w_bound = eps (m/4) (T+1)^{-2} (8M)^{-1} e^{3/2 - R0^2}.
inline DecayParams choose_decay_params(double epsilon, double sup_f, double R0, double m,
                                       double T) {
  if (!(epsilon > 0.0 && sup_f > 0.0 && R0 > 0.0 && m > 0.0 && T > 0.0)) {
    throw ValidationError("choose_decay_params: all inputs must be > 0");
  }
  const double h = 2.0 * sup_f * std::exp(R0 * R0);
  const double bound = epsilon * (m / 4.0) / ((T + 1.0) * (T + 1.0)) / (8.0 * sup_f) *
                       std::exp(1.5 - R0 * R0);
  return {h, 0.5 * std::min(1.0, bound), bound};
}

struct DecayBarrier {
  double c;
  double epsilon;
  double h;
  double w;
  std::optional<CoshTail> tail;

  /// Throws unless h > sup_f e^{R0^2} and 0 < w < min(1, w_bound).
  void validate(double sup_f, double R0, double m, double T) const {
    if (!(epsilon > 0.0)) throw ValidationError("decay barrier: epsilon must be > 0");
    if (!(h > sup_f * std::exp(R0 * R0))) {
      throw ValidationError("decay barrier: h must exceed sup f * e^{R0^2}");
    }
    const double bound = epsilon * (m / 4.0) / ((T + 1.0) * (T + 1.0)) / (8.0 * sup_f) *
                         std::exp(1.5 - R0 * R0);
    if (!(w > 0.0 && w < 1.0 && w < bound)) {
      throw ValidationError("decay barrier: w must lie in (0, min(1, w_bound))");
    }
    if (tail && !(tail->lambda > 4.0 / m)) {
      throw ValidationError("decay barrier: tail lambda must exceed 4/m");
    }
  }

  double gaussian(double x) const { return h * std::exp(-w * x * x); }
  double gaussian_dx(double x) const { return -2.0 * w * x * gaussian(x); }
  double gaussian_dxx(double x) const { return (4.0 * w * w * x * x - 2.0 * w) * gaussian(x); }
  double drift(double t) const { return epsilon + epsilon * t / (t + 1.0); }
};

inline DecayBarrier make_decay_barrier(double c, double epsilon, const DecayParams& p) {
  return {c, epsilon, p.h, p.w, std::nullopt};
}

inline double decay_barrier_value(const DecayBarrier& b, double x, double t) {
  double v = b.c + b.drift(t) + b.gaussian(x);
  if (b.tail) v += b.tail->value(x, t);
  return v;
}

/// Reflection of the decay barrier about u = c; a subsolution by the same
/// argument with all inequalities reversed.
inline double decay_lower_barrier_value(const DecayBarrier& b, double x, double t) {
  return 2.0 * b.c - decay_barrier_value(b, x, t);
}

/// Smallest K with h e^{-w x^2} <= eps for |x| >= K (0 when h <= eps).
inline double decay_radius(double h, double w, double epsilon) {
  if (!(h > 0.0 && w > 0.0 && epsilon > 0.0)) {
    throw ValidationError("decay_radius: h, w, epsilon must be > 0");
  }
  if (h <= epsilon) return 0.0;
  return std::sqrt(std::log(h / epsilon) / w);
}

// ---------------------------------------------------------------------------
// Supersolution residual
// ---------------------------------------------------------------------------

using Barrier = std::variant<CoshBarrier, DecayBarrier>;

struct BarrierJet {
  double v, vt, vx, vxx;
};

inline BarrierJet barrier_jet(const CoshBarrier& b, double x, double t) {
  const CoshTail tail{b.a, b.R, b.lambda};
  const double tv = tail.value(x, t);
  return {b.M + tv, tail.dt(x, t), tail.dx(x, t), tv};
}

inline BarrierJet barrier_jet(const DecayBarrier& b, double x, double t) {
  BarrierJet j{decay_barrier_value(b, x, t), b.epsilon / ((t + 1.0) * (t + 1.0)),
               b.gaussian_dx(x), b.gaussian_dxx(x)};
  if (b.tail) {
    j.vt += b.tail->dt(x, t);
    j.vx += b.tail->dx(x, t);
    j.vxx += b.tail->dxx(x, t);
  }
  return j;
}

inline BarrierJet barrier_jet(const Barrier& b, double x, double t) {
  return std::visit([&](const auto& bb) { return barrier_jet(bb, x, t); }, b);
}

/// Worst case of -v_t + v_xx / (q (1 + v_x^2)^{3/2}) over every admissible
/// coefficient denominator q in [m/4, inf): q = m/4 where v_xx > 0, and the
/// q -> inf limit (second-order term 0) where v_xx <= 0.
inline double barrier_residual_at(const Barrier& b, double m, double x, double t) {
  const auto j = barrier_jet(b, x, t);
  double second_order = 0.0;
  if (j.vxx > 0.0) {
    const double s = 1.0 + j.vx * j.vx;
    second_order = (4.0 / m) * j.vxx / (s * std::sqrt(s));
  }
  return -j.vt + second_order;
}

struct ResidualField {
  std::vector<double> xs;
  std::vector<double> ts;
  std::vector<std::vector<double>> values;  // values[time][space]
  double max_value = -std::numeric_limits<double>::infinity();
  double min_value = std::numeric_limits<double>::infinity();
  double argmax_x = 0.0;
  double argmax_t = 0.0;

  /// Strict supersolution everywhere on the lattice.
  bool negative() const { return max_value < 0.0; }
  /// Distance of the worst point from zero (positive when negative()).
  double margin() const { return -max_value; }
};

inline ResidualField barrier_residual(const Barrier& b, double m, std::vector<double> xs,
                                      std::vector<double> ts) {
  ResidualField field{std::move(xs), std::move(ts), {}};
  field.values.assign(field.ts.size(), std::vector<double>(field.xs.size()));
  for (std::size_t k = 0; k < field.ts.size(); ++k) {
    for (std::size_t i = 0; i < field.xs.size(); ++i) {
      const double r = barrier_residual_at(b, m, field.xs[i], field.ts[k]);
      field.values[k][i] = r;
      field.min_value = std::min(field.min_value, r);
      if (r > field.max_value) {
        field.max_value = r;
        field.argmax_x = field.xs[i];
        field.argmax_t = field.ts[k];
      }
    }
  }
  return field;
}

/// Uniform lattice [-L, L] x [0, T] with nx * nt points (defaults 201 x 101).
inline ResidualField barrier_residual(const Barrier& b, double m, double L, double T,
                                      std::size_t nx = 201, std::size_t nt = 101) {
  if (nx < 2 || nt < 2) throw ValidationError("residual lattice: need at least 2 x 2 points");
  std::vector<double> xs(nx), ts(nt);
  for (std::size_t i = 0; i < nx; ++i) xs[i] = -L + 2.0 * L * static_cast<double>(i) / (nx - 1);
  for (std::size_t k = 0; k < nt; ++k) ts[k] = T * static_cast<double>(k) / (nt - 1);
  return barrier_residual(b, m, std::move(xs), std::move(ts));
}

}  // namespace gcf
