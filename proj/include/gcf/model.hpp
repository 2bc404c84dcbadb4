#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gcf/cutoff.hpp"
#include "gcf/errors.hpp"
#include "gcf/grid.hpp"

namespace gcf {

/// Count of node evaluations at which the cutoff replaced the identity
/// (g(u) != u). Used to confirm that solutions never leave the physical range.
struct CutoffCounter {
  std::size_t hits = 0;
};

/// Centered stencils at interior node i.
struct Stencil {
  double ux;
  double uxx;
};

inline Stencil centered_stencil(std::span<const double> u, std::size_t i, double dx) {
  return {(u[i + 1] - u[i - 1]) / (2.0 * dx), (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dx * dx)};
}

inline void require_matching(std::span<const double> u, const Grid& grid) {
  if (u.size() != grid.size()) {
    throw GridMismatch("profile sample has " + std::to_string(u.size()) + " nodes, grid has " +
                       std::to_string(grid.size()));
  }
}

/// Generic right-hand side u_xx / (denominator(u) (1 + u_x^2)^{3/2}).
/// Boundary entries are zero (pinned nodes).
template <class Denominator>
std::vector<double> quasilinear_rhs(std::span<const double> u, const Grid& grid,
                                    Denominator&& denominator) {
  require_matching(u, grid);
  const std::size_t n = u.size();
  const double dx = grid.dx();
  std::vector<double> rhs(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto [ux, uxx] = centered_stencil(u, i, dx);
    const double slope_term = 1.0 + ux * ux;
    rhs[i] = uxx / (denominator(u[i]) * (slope_term * std::sqrt(slope_term)));
  }
  return rhs;
}

/// Right-hand side of the cutoff-modified equation u_t = pde_rhs(u).
inline std::vector<double> pde_rhs(std::span<const double> u, const Grid& grid,
                                   const CutoffSpec& spec, CutoffCounter* counter = nullptr) {
  return quasilinear_rhs(u, grid, [&](double z) {
    if (counter != nullptr && spec.modifies(z)) ++counter->hits;
    return cutoff_g(z, spec);
  });
}

/// Right-hand side of the unmodified equation (g = identity).
inline std::vector<double> pde_rhs_uncut(std::span<const double> u, const Grid& grid) {
  return quasilinear_rhs(u, grid, [](double z) { return z; });
}

/// Gauss curvature K = -u_xx / (u (1 + u_x^2)^2) of the surface of revolution
/// generated by u, on the same stencils as pde_rhs. Boundary entries are zero.
inline std::vector<double> gauss_curvature(std::span<const double> u, const Grid& grid) {
  require_matching(u, grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) {
      throw ValidationError("curvature positivity: u must be > 0 at node " + std::to_string(i));
    }
  }
  const std::size_t n = u.size();
  std::vector<double> k(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto [ux, uxx] = centered_stencil(u, i, grid.dx());
    const double slope_term = 1.0 + ux * ux;
    k[i] = -uxx / (u[i] * slope_term * slope_term);
  }
  return k;
}

}  // namespace gcf
