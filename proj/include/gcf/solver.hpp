#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gcf/cutoff.hpp"
#include "gcf/errors.hpp"
#include "gcf/grid.hpp"
#include "gcf/model.hpp"
#include "gcf/profile.hpp"

namespace gcf {

enum class Stepper { Explicit, ImplicitEuler };

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 30;
};

/// Everything needed to reproduce one run. Boundary nodes are pinned to
/// sigma * f(+-L) for all time.
struct SolverConfig {
  SolverConfig(InitialProfile initial, Grid g, double horizon)
      : profile(std::move(initial)), grid(g), t_end(horizon) {}

  InitialProfile profile;
  Grid grid;
  double t_end;
  double sigma = 1.0;
  Stepper stepper = Stepper::Explicit;
  std::optional<double> fixed_dt;  // empty: automatic step from stable_dt
  double safety = 0.9;
  NewtonOptions newton;
  std::size_t snapshot_every = 10;

  void validate() const {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end: must be > 0");
    if (!(sigma >= 0.0 && sigma <= 1.0)) throw ValidationError("sigma: must lie in [0, 1]");
    if (!(safety > 0.0 && safety <= 1.0)) throw ValidationError("safety: must lie in (0, 1]");
    if (!(newton.tol > 0.0)) throw ValidationError("newton tolerance: must be > 0");
    if (newton.max_iter < 0) throw ValidationError("newton max_iter: must be >= 0");
    if (snapshot_every < 1) throw ValidationError("snapshot_every: must be >= 1");
    if (fixed_dt && !(*fixed_dt > 0.0 && std::isfinite(*fixed_dt))) {
      throw ValidationError("dt: fixed step must be > 0");
    }
  }
};

/// Constants of f carried along with every trajectory.
struct TrajectoryMetadata {
  double m = 0.0;
  double sup_f = 0.0;
  double grad_min = 0.0;
  double grad_max = 0.0;
  std::optional<double> far_field_c;
  double support_radius = 0.0;
  double curvature_bound = 0.0;

  static TrajectoryMetadata from(const InitialProfile& p) {
    return {p.m(),           p.sup_f(),          p.grad_min(), p.grad_max(),
            p.far_field_c(), p.support_radius(), p.curvature_bound()};
  }
};

struct SolverStats {
  std::size_t steps = 0;
  double dt = 0.0;
  std::size_t cutoff_hits = 0;
  int max_newton_iterations = 0;
  std::size_t dt_halvings = 0;
};

/// Snapshots u(., t_k) of one run. samples[k] is aligned with config.grid.
struct Trajectory {
  SolverConfig config;
  std::vector<double> times;
  std::vector<std::vector<double>> samples;
  TrajectoryMetadata metadata;
  SolverStats stats;

  const Grid& grid() const { return config.grid; }
  double sigma() const { return config.sigma; }
  std::size_t snapshot_count() const { return times.size(); }
};

inline std::vector<double> sample_profile(const InitialProfile& profile, double sigma,
                                          const Grid& grid) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw ValidationError("sigma: must lie in [0, 1]");
  std::vector<double> u(grid.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = sigma * profile.value(grid.x(i));
  return u;
}

/// Largest explicit step keeping the scheme monotone: the diffusion
/// coefficient 1/(g(u)(1+u_x^2)^{3/2}) never exceeds 4/m because g >= m/4.
inline double stable_dt(double dx, double m, double safety) {
  if (!(m > 0.0)) throw ValidationError("stable_dt: m must be > 0");
  return safety * m * dx * dx / 8.0;
}

inline double stable_dt(const Grid& grid, double m, double safety) {
  return stable_dt(grid.dx(), m, safety);
}

inline std::vector<double> step_explicit(std::span<const double> u, double dt, const Grid& grid,
                                         const CutoffSpec& spec,
                                         CutoffCounter* counter = nullptr) {
  if (!(dt > 0.0)) throw ValidationError("dt: must be > 0");
  const auto rhs = pde_rhs(u, grid, spec, counter);
  std::vector<double> next(u.begin(), u.end());
  for (std::size_t i = 1; i + 1 < next.size(); ++i) next[i] += dt * rhs[i];
  return next;
}

namespace detail {

// Solves a tridiagonal system in place (Thomas algorithm). lower[0] and
// upper[n-1] are ignored. The Newton matrices here are diagonally dominant
// for admissible dt, so no pivoting is performed.
inline void solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                              std::vector<double> upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

inline double max_abs(std::span<const double> v) {
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::abs(x));
  return worst;
}

}  // namespace detail

struct ImplicitStepResult {
  std::vector<double> u;
  int iterations = 0;
};

/// One backward-Euler step: solves v - u - dt * pde_rhs(v) = 0 on interior
/// nodes by Newton iteration with the analytic tridiagonal Jacobian.
/// Iteration k evaluates the residual; the step is accepted at the first k
/// whose residual max-norm is below tol.
inline ImplicitStepResult step_implicit(std::span<const double> u, double dt, const Grid& grid,
                                        const CutoffSpec& spec, const NewtonOptions& newton,
                                        CutoffCounter* counter = nullptr) {
  if (!(dt > 0.0)) throw ValidationError("dt: must be > 0");
  require_matching(u, grid);
  const std::size_t n = u.size();
  const double dx = grid.dx();
  const double inv_dx2 = 1.0 / (dx * dx);
  const double inv_2dx = 1.0 / (2.0 * dx);

  std::vector<double> v(u.begin(), u.end());
  std::vector<double> residual(n), lower(n), diag(n), upper(n);
  double last_norm = 0.0;

  for (int iter = 1; iter <= newton.max_iter; ++iter) {
    const auto rhs = pde_rhs(v, grid, spec, counter);
    residual[0] = residual[n - 1] = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) residual[i] = v[i] - u[i] - dt * rhs[i];
    last_norm = detail::max_abs(residual);
    if (!std::isfinite(last_norm)) break;
    if (last_norm < newton.tol) return {std::move(v), iter};

    lower[0] = upper[0] = lower[n - 1] = upper[n - 1] = 0.0;
    diag[0] = diag[n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double p = (v[i + 1] - v[i - 1]) * inv_2dx;
      const double s = 1.0 + p * p;
      const double w = s * std::sqrt(s);
      const double dw_dp = 3.0 * p * std::sqrt(s);
      const double g = cutoff_g(v[i], spec);
      const double gp = cutoff_g_prime(v[i], spec);
      const double r = rhs[i];
      const double d_minus = inv_dx2 / (g * w) + r * dw_dp * inv_2dx / w;
      const double d_plus = inv_dx2 / (g * w) - r * dw_dp * inv_2dx / w;
      const double d_center = -2.0 * inv_dx2 / (g * w) - r * gp / g;
      lower[i] = -dt * d_minus;
      upper[i] = -dt * d_plus;
      diag[i] = 1.0 - dt * d_center;
    }
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = -residual[i];
    detail::solve_tridiagonal(lower, diag, upper, delta);
    for (std::size_t i = 1; i + 1 < n; ++i) v[i] += delta[i];
  }
  throw NewtonDivergence("Newton did not converge in " + std::to_string(newton.max_iter) +
                         " iterations (last residual " + std::to_string(last_norm) + ")");
}

/// Time step evolve() will use for this configuration, before it is shrunk
/// to divide t_end evenly.
inline double nominal_dt(const SolverConfig& config) {
  if (config.fixed_dt) return *config.fixed_dt;
  const double base = stable_dt(config.grid, config.profile.m(), config.safety);
  return config.stepper == Stepper::Explicit ? base : 10.0 * base;
}

/// Advances sigma * f from t = 0 to t_end with a uniform step dividing t_end.
/// Records t = 0, every snapshot_every-th step, and the final state.
inline Trajectory evolve(const SolverConfig& config) {
  config.validate();
  const Grid& grid = config.grid;
  const CutoffSpec spec(config.profile.m());

  Trajectory traj{config, {}, {}, TrajectoryMetadata::from(config.profile), {}};
  std::vector<double> u = sample_profile(config.profile, config.sigma, grid);

  const double dt_nominal = nominal_dt(config);
  const auto steps = static_cast<std::size_t>(std::ceil(config.t_end / dt_nominal - 1e-9));
  const std::size_t step_count = std::max<std::size_t>(steps, 1);
  const double dt = config.t_end / static_cast<double>(step_count);
  traj.stats.steps = step_count;
  traj.stats.dt = dt;

  traj.times.push_back(0.0);
  traj.samples.push_back(u);

  CutoffCounter counter;
  for (std::size_t k = 1; k <= step_count; ++k) {
    if (config.stepper == Stepper::Explicit) {
      u = step_explicit(u, dt, grid, spec, &counter);
    } else {
      try {
        auto res = step_implicit(u, dt, grid, spec, config.newton, &counter);
        traj.stats.max_newton_iterations = std::max(traj.stats.max_newton_iterations,
                                                    res.iterations);
        u = std::move(res.u);
      } catch (const NewtonDivergence&) {
        // Single fallback: two half steps, then give up.
        ++traj.stats.dt_halvings;
        for (int half = 0; half < 2; ++half) {
          auto res = step_implicit(u, 0.5 * dt, grid, spec, config.newton, &counter);
          traj.stats.max_newton_iterations = std::max(traj.stats.max_newton_iterations,
                                                      res.iterations);
          u = std::move(res.u);
        }
      }
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!std::isfinite(u[i])) {
        throw StabilityViolation("non-finite value at node " + std::to_string(i) + " in step " +
                                 std::to_string(k));
      }
    }
    if (k % config.snapshot_every == 0 || k == step_count) {
      traj.times.push_back(config.t_end * static_cast<double>(k) /
                           static_cast<double>(step_count));
      traj.samples.push_back(u);
    }
  }
  traj.stats.cutoff_hits = counter.hits;
  return traj;
}

}  // namespace gcf
