#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gcf/barriers.hpp"
#include "gcf/errors.hpp"
#include "gcf/model.hpp"
#include "gcf/solver.hpp"

namespace gcf {

struct SpaceTimePoint {
  double x = 0.0;
  double t = 0.0;
};

/// Outcome of one checker. worst_violation <= 0 means the claim holds with
/// that much room; pass is exactly worst_violation <= tolerance_used.
/// An inconclusive report passes but carries a note explaining why nothing
/// could be tested.
struct InvariantReport {
  std::string name;
  bool pass = false;
  double worst_violation = -std::numeric_limits<double>::infinity();
  SpaceTimePoint location;
  double tolerance_used = 0.0;
  bool inconclusive = false;
  std::string note;
};

inline InvariantReport named_report(std::string name) {
  InvariantReport r;
  r.name = std::move(name);
  return r;
}

namespace detail {

inline void record(InvariantReport& r, double violation, double x, double t) {
  if (violation > r.worst_violation) {
    r.worst_violation = violation;
    r.location = {x, t};
  }
}

inline InvariantReport& finish(InvariantReport& r) {
  r.pass = r.worst_violation <= r.tolerance_used;
  return r;
}

inline double trajectory_min(const Trajectory& traj) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples)
    for (double v : s) lo = std::min(lo, v);
  return lo;
}

inline void require_problem_two(const Trajectory& traj, const char* who) {
  if (!traj.metadata.far_field_c) {
    throw PreconditionViolation(std::string(who) +
                                ": profile is not constant outside a compact set");
  }
}

inline void require_snapshots(const Trajectory& traj, std::size_t count, const char* who) {
  if (traj.samples.size() < count || traj.times.size() != traj.samples.size()) {
    throw PreconditionViolation(std::string(who) + ": need at least " + std::to_string(count) +
                                " snapshots");
  }
  for (const auto& s : traj.samples) require_matching(s, traj.grid());
}

}  // namespace detail

inline double trajectory_min(const Trajectory& traj) { return detail::trajectory_min(traj); }

// ---------------------------------------------------------------------------
// Parabolic geometry and Hölder seminorms
// ---------------------------------------------------------------------------

/// max(|x1 - x2|, sqrt|t1 - t2|)
inline double parabolic_distance(SpaceTimePoint a, SpaceTimePoint b) {
  return std::max(std::abs(a.x - b.x), std::sqrt(std::abs(a.t - b.t)));
}

enum class HolderTarget { Ut, Uxx, Ux };

struct HolderEstimate {
  HolderTarget target;
  double alpha;
  double value;
  std::size_t pair_count;
};

namespace detail {

struct DerivativeField {
  std::vector<SpaceTimePoint> points;
  std::vector<double> values;
  std::size_t rows = 0;  // time levels
  std::size_t cols = 0;  // nodes per level
};

inline DerivativeField derivative_field(const Trajectory& traj, HolderTarget target) {
  const Grid& grid = traj.grid();
  const std::size_t n = grid.size();
  const double dx = grid.dx();
  DerivativeField f;
  f.cols = n - 2;
  if (target == HolderTarget::Ut) {
    f.rows = traj.samples.size() - 1;
    for (std::size_t k = 0; k + 1 < traj.samples.size(); ++k) {
      const double tau = traj.times[k + 1] - traj.times[k];
      const double tm = 0.5 * (traj.times[k] + traj.times[k + 1]);
      for (std::size_t i = 1; i + 1 < n; ++i) {
        f.points.push_back({grid.x(i), tm});
        f.values.push_back((traj.samples[k + 1][i] - traj.samples[k][i]) / tau);
      }
    }
    return f;
  }
  f.rows = traj.samples.size();
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const auto st = centered_stencil(traj.samples[k], i, dx);
      f.points.push_back({grid.x(i), traj.times[k]});
      f.values.push_back(target == HolderTarget::Ux ? st.ux : st.uxx);
    }
  }
  return f;
}

}  // namespace detail

/// Sampled lower bound on the parabolic alpha-Hölder seminorm of a stencil
/// derivative: the max of |D(X) - D(Y)| / d(X, Y)^alpha over every
/// space- and time-adjacent lattice pair plus `random_pairs` uniformly drawn
/// pairs from a generator seeded with `seed`. Larger random_pairs with the
/// same seed extends the sample, so the estimate never decreases.
inline HolderEstimate holder_seminorm(const Trajectory& traj, HolderTarget target, double alpha,
                                      std::size_t random_pairs = 100000,
                                      std::uint64_t seed = 0) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("holder: alpha must lie in (0, 1)");
  detail::require_snapshots(traj, 2, "holder_seminorm");
  const auto field = detail::derivative_field(traj, target);
  double best = 0.0;
  std::size_t pairs = 0;
  auto visit = [&](std::size_t p, std::size_t q) {
    const double d = parabolic_distance(field.points[p], field.points[q]);
    if (d <= 0.0) return;
    ++pairs;
    best = std::max(best, std::abs(field.values[p] - field.values[q]) / std::pow(d, alpha));
  };
  for (std::size_t r = 0; r < field.rows; ++r) {
    for (std::size_t c = 0; c < field.cols; ++c) {
      const std::size_t p = r * field.cols + c;
      if (c + 1 < field.cols) visit(p, p + 1);
      if (r + 1 < field.rows) visit(p, p + field.cols);
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, field.values.size() - 1);
  for (std::size_t s = 0; s < random_pairs; ++s) {
    const std::size_t p = pick(rng);
    const std::size_t q = pick(rng);
    visit(p, q);
  }
  return {target, alpha, best, pairs};
}

// ---------------------------------------------------------------------------
// Sup bounds
// ---------------------------------------------------------------------------

inline double default_bounds_tolerance(const Trajectory& traj) {
  const double dx = traj.grid().dx();
  return 10.0 * dx * dx + 1e-10;
}

/// sigma inf f - tol <= u <= sigma sup f + tol at every node of every snapshot.
inline InvariantReport check_bounds(const Trajectory& traj,
                                    std::optional<double> tolerance = std::nullopt) {
  detail::require_snapshots(traj, 1, "check_bounds");
  auto r = named_report("bounds");
  r.tolerance_used = tolerance.value_or(default_bounds_tolerance(traj));
  const double lower = traj.sigma() * traj.metadata.m;
  const double upper = traj.sigma() * traj.metadata.sup_f;
  const Grid& grid = traj.grid();
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double u = traj.samples[k][i];
      detail::record(r, std::max(u - upper, lower - u), grid.x(i), traj.times[k]);
    }
  }
  return detail::finish(r);
}

/// For sigma = 1: min u >= inf f - tol over the trajectory, so g(u) = u, and
/// the solver never evaluated the modified branch of g (stats.cutoff_hits == 0).
inline InvariantReport check_no_cutoff(const Trajectory& traj,
                                       std::optional<double> tolerance = std::nullopt) {
  detail::require_snapshots(traj, 1, "check_no_cutoff");
  auto r = named_report("no_cutoff");
  r.tolerance_used = tolerance.value_or(default_bounds_tolerance(traj));
  const double floor = traj.sigma() * traj.metadata.m;
  const Grid& grid = traj.grid();
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      detail::record(r, floor - traj.samples[k][i], grid.x(i), traj.times[k]);
    }
  }
  detail::finish(r);
  if (traj.stats.cutoff_hits != 0) {
    r.pass = false;
    r.note = "cutoff branch evaluated " + std::to_string(traj.stats.cutoff_hits) + " times";
  }
  return r;
}

// ---------------------------------------------------------------------------
// Gradient range for compactly perturbed data
// ---------------------------------------------------------------------------

inline double default_gradient_tolerance(const Trajectory& traj) {
  return 10.0 * traj.grid().dx() + 1e-10;
}

/// min f' - tol <= u_x <= max f' + tol at interior nodes (sigma-scaled).
inline InvariantReport check_gradient_range(const Trajectory& traj,
                                            std::optional<double> tolerance = std::nullopt) {
  detail::require_problem_two(traj, "check_gradient_range");
  detail::require_snapshots(traj, 1, "check_gradient_range");
  auto r = named_report("gradient_range");
  r.tolerance_used = tolerance.value_or(default_gradient_tolerance(traj));
  const double lo = traj.sigma() * traj.metadata.grad_min;
  const double hi = traj.sigma() * traj.metadata.grad_max;
  const Grid& grid = traj.grid();
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double ux = centered_stencil(traj.samples[k], i, grid.dx()).ux;
      detail::record(r, std::max(ux - hi, lo - ux), grid.x(i), traj.times[k]);
    }
  }
  return detail::finish(r);
}

// ---------------------------------------------------------------------------
// Bernstein gradient bound
// ---------------------------------------------------------------------------

enum class BernsteinConstant {
  InfF,  // 1/(2u^3) <= 1/(2 m^3) with m = inf of the initial data
  SupF,  // the cap value of the bound argument, for side-by-side comparison
};

struct BernsteinOptions {
  BernsteinConstant constant = BernsteinConstant::InfF;
  std::optional<double> tolerance;
};

inline double default_bernstein_tolerance(const Trajectory& traj) {
  return 20.0 * traj.grid().dx() + 1e-8;
}

/// Two checks on G(t) = max_x (1 + u_x^2)(., t):
///  (a) G(t) <= e^{t/(2 m^3)} max(1 + f'^2) + tol at every snapshot,
///  (b) s(t) = e^{-t/(2 m^3)} G(t) is non-increasing within tol.
/// Requires min u >= m/2 over the trajectory, so g(u) = u throughout.
inline InvariantReport check_bernstein(const Trajectory& traj, const BernsteinOptions& opts = {}) {
  detail::require_snapshots(traj, 1, "check_bernstein");
  const auto& md = traj.metadata;
  if (detail::trajectory_min(traj) < 0.5 * md.m) {
    throw PreconditionViolation("check_bernstein: trajectory enters the cutoff region u < m/2");
  }
  auto r = named_report("bernstein");
  r.tolerance_used = opts.tolerance.value_or(default_bernstein_tolerance(traj));
  const double sigma = traj.sigma();
  const double base = opts.constant == BernsteinConstant::InfF ? sigma * md.m : sigma * md.sup_f;
  const double rate = 1.0 / (2.0 * base * base * base);
  const double steepest = sigma * std::max(std::abs(md.grad_min), std::abs(md.grad_max));
  const double initial_max = 1.0 + steepest * steepest;

  const Grid& grid = traj.grid();
  double previous_weighted = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const double t = traj.times[k];
    double g_max = 1.0;
    double x_at = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double ux = centered_stencil(traj.samples[k], i, grid.dx()).ux;
      if (1.0 + ux * ux > g_max) {
        g_max = 1.0 + ux * ux;
        x_at = grid.x(i);
      }
    }
    detail::record(r, g_max - std::exp(rate * t) * initial_max, x_at, t);
    const double weighted = std::exp(-rate * t) * g_max;
    detail::record(r, weighted - previous_weighted, x_at, t);
    previous_weighted = weighted;
  }
  return detail::finish(r);
}

// ---------------------------------------------------------------------------
// Comparison against barriers and far-field decay
// ---------------------------------------------------------------------------

enum class BarrierSide { Upper, Lower };

inline double default_comparison_tolerance(const Trajectory& traj) {
  const double dx = traj.grid().dx();
  return 1e-8 + 10.0 * dx * dx;
}

/// Upper: max of u - v over every node and snapshot. Lower: max of v_low - u
/// with v_low the reflection of v about its base level (M or c).
inline InvariantReport comparison_check(const Trajectory& traj, const Barrier& barrier,
                                        BarrierSide side = BarrierSide::Upper,
                                        std::optional<double> tolerance = std::nullopt) {
  detail::require_snapshots(traj, 1, "comparison_check");
  const Grid& grid = traj.grid();
  const auto& initial = traj.samples.front();
  const double init_max = *std::max_element(initial.begin(), initial.end());
  const double init_min = *std::min_element(initial.begin(), initial.end());

  double base = 0.0;
  if (const auto* cb = std::get_if<CoshBarrier>(&barrier)) {
    base = cb->M;
    const bool ok = side == BarrierSide::Upper ? cb->M >= init_max - 1e-12
                                               : cb->M <= init_min + 1e-12;
    if (!ok) throw ValidationError("comparison_check: mismatched constants (cap M vs initial data)");
  } else {
    const auto& db = std::get<DecayBarrier>(barrier);
    base = db.c;
    const auto c = traj.metadata.far_field_c;
    if (!c || std::abs(*c * traj.sigma() - db.c) > 1e-12) {
      throw ValidationError("comparison_check: mismatched constants (far-field value c)");
    }
  }

  auto r = named_report(side == BarrierSide::Upper ? "comparison_upper" : "comparison_lower");
  r.tolerance_used = tolerance.value_or(default_comparison_tolerance(traj));
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const double t = traj.times[k];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.x(i);
      const double v = barrier_jet(barrier, x, t).v;
      const double u = traj.samples[k][i];
      const double violation = side == BarrierSide::Upper ? u - v : (2.0 * base - v) - u;
      detail::record(r, violation, x, t);
    }
  }
  return detail::finish(r);
}

struct DecayCheck {
  double K;
  DecayBarrier barrier;
  InvariantReport report;
};

/// Builds the Gaussian barrier for the trajectory's constants with T equal
/// to the final snapshot time, then checks |u - c| < 3 eps + tol on |x| > K.
/// When K >= L nothing lies beyond K on this grid: the report is inconclusive
/// (passes, with a note).
inline DecayCheck check_decay(const Trajectory& traj, double epsilon,
                              std::optional<double> tolerance = std::nullopt) {
  detail::require_problem_two(traj, "check_decay");
  detail::require_snapshots(traj, 1, "check_decay");
  const auto& md = traj.metadata;
  const double sigma = traj.sigma();
  const double c = sigma * *md.far_field_c;
  const double T = std::max(traj.times.back(), std::numeric_limits<double>::min());
  // The barrier constants stay those of f; sigma f is dominated by f.
  const auto params = choose_decay_params(epsilon, md.sup_f, md.support_radius, md.m, T);
  const double K = decay_radius(params.h, params.w, epsilon);
  DecayCheck out{K, make_decay_barrier(c, epsilon, params), named_report("decay")};
  auto& r = out.report;
  r.tolerance_used = tolerance.value_or(default_bounds_tolerance(traj));
  const Grid& grid = traj.grid();
  if (K >= grid.half_width()) {
    r.inconclusive = true;
    r.pass = true;
    r.worst_violation = 0.0;
    r.note = "decay radius K = " + std::to_string(K) + " >= L = " +
             std::to_string(grid.half_width()) + "; no nodes beyond K";
    return out;
  }
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.x(i);
      if (std::abs(x) <= K) continue;
      detail::record(r, std::abs(traj.samples[k][i] - c) - 3.0 * epsilon, x, traj.times[k]);
    }
  }
  detail::finish(r);
  return out;
}

// ---------------------------------------------------------------------------
// Mixed derivative identity
// ---------------------------------------------------------------------------

/// u_tx expressed through spatial derivatives for a solution with g(u) = u:
///   [-u_x u_xx (1+u_x^2) - 3 u u_x u_xx^2 + u (1+u_x^2) u_xxx] / (u^2 (1+u_x^2)^{5/2})
inline double mixed_derivative_rhs(double u, double ux, double uxx, double uxxx) {
  const double s = 1.0 + ux * ux;
  const double numer = -ux * uxx * s - 3.0 * u * ux * uxx * uxx + u * s * uxxx;
  return numer / (u * u * s * s * std::sqrt(s));
}

using MixedDerivativeFormula = std::function<double(double, double, double, double)>;

struct MixedDerivativeDiscrepancy {
  double value = 0.0;
  SpaceTimePoint location;
  double snapshot_spacing = 0.0;
  double dx = 0.0;
};

/// Max over interior snapshots and nodes 2..n-3 of |centered time difference
/// of u_x  -  formula(u, u_x, u_xx, u_xxx)|, with a 5-point u_xxx stencil.
/// Only centered differences whose earlier snapshot is at t >= t_min count;
/// rough data leaves an initial layer where the first time difference is
/// dominated by u_ttx and does not shrink at the nominal rate.
inline MixedDerivativeDiscrepancy mixed_derivative_discrepancy(
    const Trajectory& traj, const MixedDerivativeFormula& formula = mixed_derivative_rhs,
    double t_min = 0.0) {
  detail::require_snapshots(traj, 3, "mixed_derivative_check");
  const Grid& grid = traj.grid();
  if (grid.size() < 5) throw PreconditionViolation("mixed_derivative_check: need >= 5 nodes");
  if (detail::trajectory_min(traj) < 0.5 * traj.metadata.m) {
    throw PreconditionViolation("mixed_derivative_check: trajectory enters the cutoff region");
  }
  const double spacing = traj.times[1] - traj.times[0];
  for (std::size_t k = 1; k + 1 < traj.times.size(); ++k) {
    if (std::abs((traj.times[k + 1] - traj.times[k]) - spacing) > 1e-9 * (1.0 + spacing)) {
      throw PreconditionViolation("mixed_derivative_check: snapshots must be uniformly spaced");
    }
  }
  const double dx = grid.dx();
  MixedDerivativeDiscrepancy out{0.0, {}, spacing, dx};
  const std::size_t n = grid.size();
  for (std::size_t k = 1; k + 1 < traj.samples.size(); ++k) {
    if (traj.times[k - 1] < t_min) continue;
    const auto& prev = traj.samples[k - 1];
    const auto& cur = traj.samples[k];
    const auto& next = traj.samples[k + 1];
    const double span = traj.times[k + 1] - traj.times[k - 1];
    for (std::size_t i = 2; i + 2 < n; ++i) {
      const double lhs = (centered_stencil(next, i, dx).ux - centered_stencil(prev, i, dx).ux) / span;
      const auto st = centered_stencil(cur, i, dx);
      const double uxxx =
          (cur[i + 2] - 2.0 * cur[i + 1] + 2.0 * cur[i - 1] - cur[i - 2]) / (2.0 * dx * dx * dx);
      const double d = std::abs(lhs - formula(cur[i], st.ux, st.uxx, uxxx));
      if (d > out.value) {
        out.value = d;
        out.location = {grid.x(i), traj.times[k]};
      }
    }
  }
  return out;
}

/// Single-resolution form: discrepancy <= C (snapshot spacing + dx^2).
inline InvariantReport mixed_derivative_check(
    const Trajectory& traj, double constant,
    const MixedDerivativeFormula& formula = mixed_derivative_rhs, double t_min = 0.0) {
  const auto d = mixed_derivative_discrepancy(traj, formula, t_min);
  auto r = named_report("mixed_derivative");
  r.tolerance_used = constant * (d.snapshot_spacing + d.dx * d.dx);
  r.worst_violation = d.value;
  r.location = d.location;
  return detail::finish(r);
}

/// Refinement form: trajectories ordered coarse to fine, each halving both
/// the snapshot spacing and dx. Passes iff every successive discrepancy
/// ratio has log2 >= 1; worst_violation is 1 - (smallest observed order).
inline InvariantReport mixed_derivative_refinement(
    std::span<const Trajectory> levels,
    const MixedDerivativeFormula& formula = mixed_derivative_rhs, double t_min = 0.0) {
  if (levels.size() < 2) throw PreconditionViolation("mixed_derivative_refinement: need >= 2 levels");
  auto r = named_report("mixed_derivative_refinement");
  r.tolerance_used = 0.0;
  std::vector<double> values;
  for (const auto& t : levels) values.push_back(mixed_derivative_discrepancy(t, formula, t_min).value);
  for (std::size_t j = 0; j + 1 < values.size(); ++j) {
    const double order = std::log2(values[j] / values[j + 1]);
    detail::record(r, 1.0 - (std::isfinite(order) ? order : 0.0), 0.0, 0.0);
  }
  return detail::finish(r);
}

// ---------------------------------------------------------------------------
// Convergence studies
// ---------------------------------------------------------------------------

enum class Refinement {
  Space,  // halve dx; dt scaled by 1/4 (explicit) or 1/2 (implicit)
  Time,   // fixed grid, halve dt
};

struct ConvergenceStudy {
  std::vector<double> dx;
  std::vector<double> dt;
  std::vector<double> differences;  // max |u_j - u_{j+1}| on shared nodes, |x| <= L/2
  std::vector<double> orders;       // log2(differences[j] / differences[j+1])
  std::optional<double> order;      // finest estimate; empty when differences vanish
};

/// Richardson estimate from successive refinements of `config`: the final
/// states of neighbouring levels are compared on the coarser level's nodes.
inline ConvergenceStudy convergence_order(const SolverConfig& config, int levels,
                                          Refinement kind = Refinement::Space) {
  if (levels < 3) throw ValidationError("convergence_order: levels must be >= 3");
  config.validate();
  const double base_step = [&] {
    const double nominal = nominal_dt(config);
    const double count = std::ceil(config.t_end / nominal - 1e-9);
    return config.t_end / std::max(1.0, count);
  }();
  const double dt_ratio =
      kind == Refinement::Time ? 0.5 : (config.stepper == Stepper::Explicit ? 0.25 : 0.5);

  ConvergenceStudy study;
  std::vector<Trajectory> runs;
  for (int j = 0; j < levels; ++j) {
    SolverConfig c = config;
    if (kind == Refinement::Space) {
      const std::size_t n = (config.grid.size() - 1) * (std::size_t{1} << j) + 1;
      c.grid = Grid(config.grid.half_width(), n);
    }
    c.fixed_dt = base_step * std::pow(dt_ratio, j);
    c.snapshot_every = std::numeric_limits<std::size_t>::max();
    runs.push_back(evolve(c));
    study.dx.push_back(runs.back().grid().dx());
    study.dt.push_back(runs.back().stats.dt);
  }
  for (int j = 0; j + 1 < levels; ++j) {
    const auto& coarse = runs[j];
    const auto& fine = runs[j + 1];
    const std::size_t stride = kind == Refinement::Space ? 2 : 1;
    const double window = 0.5 * coarse.grid().half_width();
    double diff = 0.0;
    for (std::size_t i = 0; i < coarse.grid().size(); ++i) {
      if (std::abs(coarse.grid().x(i)) > window) continue;
      diff = std::max(diff, std::abs(coarse.samples.back()[i] - fine.samples.back()[i * stride]));
    }
    study.differences.push_back(diff);
  }
  constexpr double negligible = 1e-13;
  for (std::size_t j = 0; j + 1 < study.differences.size(); ++j) {
    if (study.differences[j] < negligible || study.differences[j + 1] < negligible) continue;
    study.orders.push_back(std::log2(study.differences[j] / study.differences[j + 1]));
  }
  if (study.orders.size() == study.differences.size() - 1) study.order = study.orders.back();
  return study;
}

}  // namespace gcf
