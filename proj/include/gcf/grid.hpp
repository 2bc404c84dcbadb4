#pragma once

#include <cstddef>
#include <vector>

#include "gcf/errors.hpp"

namespace gcf {

/// Uniform node set on the truncated interval [-L, L]. The node count is odd
/// so that x = 0 is a node.
class Grid {
 public:
  Grid(double half_width, std::size_t nodes) : half_width_(half_width), n_(nodes) {
    if (!(half_width > 0.0)) throw ValidationError("grid half-width: L must be > 0");
    if (nodes < 3) throw ValidationError("grid size: n must be >= 3");
    if (nodes % 2 == 0) throw ValidationError("grid parity: n must be odd");
    dx_ = 2.0 * half_width / static_cast<double>(nodes - 1);
  }

  double half_width() const { return half_width_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  std::size_t center() const { return (n_ - 1) / 2; }

  // Symmetric evaluation keeps x(center) == 0 and x(n-1) == L exactly.
  double x(std::size_t i) const {
    if (i == center()) return 0.0;
    if (i == 0) return -half_width_;
    if (i == n_ - 1) return half_width_;
    const auto c = static_cast<double>(center());
    const auto k = static_cast<double>(i) - c;
    return half_width_ * (k / c);
  }

  std::vector<double> nodes() const {
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
    return xs;
  }

  bool operator==(const Grid&) const = default;

 private:
  double half_width_;
  std::size_t n_;
  double dx_;
};

inline Grid make_grid(double half_width, std::size_t nodes) { return Grid(half_width, nodes); }

}  // namespace gcf
