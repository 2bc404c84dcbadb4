#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "gcf/errors.hpp"

namespace gcf {

enum class Preset { Constant, BumpOnConstant, SmoothedStep, DecayingSinusoid };

inline std::string_view preset_name(Preset p) {
  switch (p) {
    case Preset::Constant: return "Constant";
    case Preset::BumpOnConstant: return "BumpOnConstant";
    case Preset::SmoothedStep: return "SmoothedStep";
    case Preset::DecayingSinusoid: return "DecayingSinusoid";
  }
  return "Constant";
}

inline Preset parse_preset(std::string_view name) {
  for (auto p : {Preset::Constant, Preset::BumpOnConstant, Preset::SmoothedStep,
                 Preset::DecayingSinusoid}) {
    if (preset_name(p) == name) return p;
  }
  throw ValidationError("preset: unknown profile name '" + std::string(name) + "'");
}

struct ProfileParams {
  double c = 1.0;          // far-field / base value
  double amplitude = 0.0;  // A
  double radius = 1.0;     // R0: support radius or transition width
  bool operator==(const ProfileParams&) const = default;
};

namespace detail {

// Refine an extremum of fn on [lo, hi] by golden-section search.
inline double golden_section(const std::function<double(double)>& fn, double lo, double hi,
                             bool maximize) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto score = [&](double x) { return maximize ? -fn(x) : fn(x); };
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = score(c), fd = score(d);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + std::abs(a)); ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - inv_phi * (b - a); fc = score(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + inv_phi * (b - a); fd = score(d);
    }
  }
  return 0.5 * (a + b);
}

// Global extreme value of fn over [lo, hi]: dense scan, then local refinement
// around the best sample. Never worse than the best scanned sample.
inline double scan_extreme(const std::function<double(double)>& fn, double lo, double hi,
                           int samples, bool maximize) {
  const double step = (hi - lo) / samples;
  int best = 0;
  double best_val = fn(lo);
  for (int k = 1; k <= samples; ++k) {
    const double v = fn(lo + k * step);
    if (maximize ? v > best_val : v < best_val) {
      best_val = v;
      best = k;
    }
  }
  const double a = std::max(lo, lo + (best - 1) * step);
  const double b = std::min(hi, lo + (best + 1) * step);
  const double refined = fn(golden_section(fn, a, b, maximize));
  return maximize ? std::max(best_val, refined) : std::min(best_val, refined);
}

// Normalised compact bump e * exp(-1/(1-s^2)) on |s| < 1 and its derivatives.
inline double bump(double s) {
  const double q = 1.0 - s * s;
  if (q <= 0.0) return 0.0;
  return std::numbers::e * std::exp(-1.0 / q);
}

inline double bump_d1(double s) {
  const double b = bump(s);
  if (b == 0.0) return 0.0;
  const double q = 1.0 - s * s;
  return b * (-2.0 * s / (q * q));
}

inline double bump_d2(double s) {
  const double b = bump(s);
  if (b == 0.0) return 0.0;
  const double q = 1.0 - s * s;
  const double s2 = s * s;
  return b * (6.0 * s2 * s2 - 2.0) / (q * q * q * q);
}

}  // namespace detail

/// Initial surface generator f together with its derived constants.
///
/// Every preset is C^2 with closed-form f, f' and f''. The constants
///   m         = inf f (> 0),
///   sup_f     = sup f,
///   grad_min  = inf f', grad_max = sup f',
///   curvature_bound = sup |f''|
/// are computed once at construction: in closed form where available, by
/// dense scan plus golden-section refinement otherwise.
/// far_field_c is set iff f is identically c outside [-R0, R0].
class InitialProfile {
 public:
  static InitialProfile constant(double c, double radius = 1.0) {
    return InitialProfile(Preset::Constant, {c, 0.0, radius});
  }
  static InitialProfile bump_on_constant(double c, double amplitude, double radius) {
    return InitialProfile(Preset::BumpOnConstant, {c, amplitude, radius});
  }
  static InitialProfile smoothed_step(double c, double amplitude, double radius) {
    return InitialProfile(Preset::SmoothedStep, {c, amplitude, radius});
  }
  static InitialProfile decaying_sinusoid(double c, double amplitude) {
    return InitialProfile(Preset::DecayingSinusoid, {c, amplitude, 1.0});
  }

  InitialProfile(Preset preset, ProfileParams params) : preset_(preset), params_(params) {
    if (!std::isfinite(params.c) || !std::isfinite(params.amplitude) ||
        !std::isfinite(params.radius)) {
      throw ValidationError("profile parameters: must be finite");
    }
    if (!(params.radius > 0.0)) throw ValidationError("profile radius: R0 must be > 0");
    derive_constants();
    if (!(m_ > 0.0)) throw ValidationError("profile positivity: inf f must be > 0");
  }

  Preset preset() const { return preset_; }
  const ProfileParams& params() const { return params_; }

  double value(double x) const {
    const double c = params_.c, a = params_.amplitude, r = params_.radius;
    switch (preset_) {
      case Preset::Constant: return c;
      case Preset::BumpOnConstant: return c + a * detail::bump(x / r);
      case Preset::SmoothedStep: return c + a * 0.5 * (1.0 + std::tanh(x / r));
      case Preset::DecayingSinusoid: return c + a * std::sin(x) / (1.0 + x * x);
    }
    return c;
  }

  double slope(double x) const {
    const double a = params_.amplitude, r = params_.radius;
    switch (preset_) {
      case Preset::Constant: return 0.0;
      case Preset::BumpOnConstant: return a / r * detail::bump_d1(x / r);
      case Preset::SmoothedStep: {
        const double sech = 1.0 / std::cosh(x / r);
        return a / (2.0 * r) * sech * sech;
      }
      case Preset::DecayingSinusoid: {
        const double q = 1.0 + x * x;
        return a * (std::cos(x) * q - 2.0 * x * std::sin(x)) / (q * q);
      }
    }
    return 0.0;
  }

  double second_derivative(double x) const {
    const double a = params_.amplitude, r = params_.radius;
    switch (preset_) {
      case Preset::Constant: return 0.0;
      case Preset::BumpOnConstant: return a / (r * r) * detail::bump_d2(x / r);
      case Preset::SmoothedStep: {
        const double y = x / r;
        const double sech = 1.0 / std::cosh(y);
        return -a / (r * r) * sech * sech * std::tanh(y);
      }
      case Preset::DecayingSinusoid: {
        const double q = 1.0 + x * x;
        const double s = std::sin(x), co = std::cos(x);
        return a * (-s * (q + 2.0) * q - 4.0 * x * q * co + 8.0 * x * x * s) / (q * q * q);
      }
    }
    return 0.0;
  }

  double m() const { return m_; }
  double sup_f() const { return sup_f_; }
  double grad_min() const { return grad_min_; }
  double grad_max() const { return grad_max_; }
  double curvature_bound() const { return curvature_bound_; }
  std::optional<double> far_field_c() const { return far_field_c_; }
  double support_radius() const { return params_.radius; }

  bool operator==(const InitialProfile& o) const {
    return preset_ == o.preset_ && params_ == o.params_;
  }

 private:
  void derive_constants() {
    const double c = params_.c, a = params_.amplitude, r = params_.radius;
    switch (preset_) {
      case Preset::Constant:
        m_ = sup_f_ = c;
        grad_min_ = grad_max_ = 0.0;
        curvature_bound_ = 0.0;
        far_field_c_ = c;
        break;
      case Preset::BumpOnConstant: {
        m_ = std::min(c, c + a);
        sup_f_ = std::max(c, c + a);
        // |B'| peaks where B'' = 0, i.e. s^4 = 1/3.
        const double s_star = std::pow(3.0, -0.25);
        const double peak = std::abs(a) / r * std::abs(detail::bump_d1(s_star));
        grad_min_ = -peak;
        grad_max_ = peak;
        curvature_bound_ = detail::scan_extreme(
            [this](double x) { return std::abs(second_derivative(x)); }, -r, r, 20000, true);
        far_field_c_ = c;
        break;
      }
      case Preset::SmoothedStep: {
        m_ = std::min(c, c + a);
        sup_f_ = std::max(c, c + a);
        const double peak = a / (2.0 * r);
        grad_min_ = std::min(0.0, peak);
        grad_max_ = std::max(0.0, peak);
        // |f''| peaks where tanh(x/R0)^2 = 1/3.
        curvature_bound_ = 2.0 * std::abs(a) / (3.0 * std::sqrt(3.0) * r * r);
        far_field_c_.reset();
        break;
      }
      case Preset::DecayingSinusoid: {
        // Extremes of sin(x)/(1+x^2) and its derivatives lie within a few units of 0;
        // outside [-20, 20] the oscillation is below |A|/401.
        auto f = [this](double x) { return value(x); };
        auto df = [this](double x) { return slope(x); };
        auto d2 = [this](double x) { return std::abs(second_derivative(x)); };
        constexpr double window = 20.0;
        constexpr int samples = 40000;
        m_ = std::min(detail::scan_extreme(f, -window, window, samples, false),
                      c - std::abs(a) / (1.0 + window * window));
        sup_f_ = std::max(detail::scan_extreme(f, -window, window, samples, true),
                          c + std::abs(a) / (1.0 + window * window));
        grad_min_ = std::min(0.0, detail::scan_extreme(df, -window, window, samples, false));
        grad_max_ = std::max(0.0, detail::scan_extreme(df, -window, window, samples, true));
        curvature_bound_ = detail::scan_extreme(d2, -window, window, samples, true);
        far_field_c_.reset();
        break;
      }
    }
  }

  Preset preset_;
  ProfileParams params_;
  double m_ = 0.0;
  double sup_f_ = 0.0;
  double grad_min_ = 0.0;
  double grad_max_ = 0.0;
  double curvature_bound_ = 0.0;
  std::optional<double> far_field_c_;
};

}  // namespace gcf
