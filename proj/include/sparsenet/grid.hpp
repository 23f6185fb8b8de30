#ifndef SPARSENET_GRID_HPP
#define SPARSENET_GRID_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sparsenet/error.hpp"

namespace sparsenet {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const noexcept { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned closed box.
using Box = std::vector<Interval>;

inline double box_volume(const Box& box) {
  double v = 1.0;
  for (const auto& iv : box) v *= iv.length();
  return v;
}

/**
 * Uniform tensor grid over a box, n points per dimension including both endpoints.
 * Flat indices are row-major: the first coordinate varies slowest.
 */
class Grid {
 public:
  Grid(Box box, std::size_t n) : box_(std::move(box)), n_(n) {
    detail::require(!box_.empty(), "grid: box must have at least one dimension");
    detail::require(n_ >= 2, "grid: need at least 2 points per dimension");
    for (const auto& iv : box_) {
      detail::require(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.hi > iv.lo,
                      "grid: each interval needs lo < hi");
    }
  }

  /// Square grid [lo, hi]^dims.
  static Grid cube(std::size_t dims, double lo, double hi, std::size_t n) {
    return Grid(Box(dims, Interval{lo, hi}), n);
  }

  std::size_t dims() const noexcept { return box_.size(); }
  std::size_t n() const noexcept { return n_; }
  const Box& box() const noexcept { return box_; }

  std::size_t size() const noexcept {
    std::size_t s = 1;
    for (std::size_t i = 0; i < dims(); ++i) s *= n_;
    return s;
  }

  double spacing(std::size_t dim) const { return box_[dim].length() / static_cast<double>(n_ - 1); }

  /// Coordinate of the i-th node along one dimension.
  double node(std::size_t dim, std::size_t i) const {
    const auto& iv = box_[dim];
    return iv.lo + iv.length() * static_cast<double>(i) / static_cast<double>(n_ - 1);
  }

  /// Riemann-sum weight of one cell.
  double cell_weight() const {
    double w = 1.0;
    for (std::size_t d = 0; d < dims(); ++d) w *= spacing(d);
    return w;
  }

  /// True when the node is the lower corner of a cell, i.e. no coordinate sits on the upper edge.
  /// L2 sums run over these (n-1)^d nodes with weight cell_weight() each.
  bool is_cell_corner(std::size_t flat) const noexcept {
    for (std::size_t d = 0; d < dims(); ++d) {
      if (flat % n_ == n_ - 1) return false;
      flat /= n_;
    }
    return true;
  }

  void point(std::size_t flat, std::span<double> out) const {
    for (std::size_t d = dims(); d-- > 0;) {
      out[d] = node(d, flat % n_);
      flat /= n_;
    }
  }

  std::vector<double> point(std::size_t flat) const {
    std::vector<double> p(dims());
    point(flat, p);
    return p;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Box box_;
  std::size_t n_;
};

struct SampledFunction {
  Grid grid;
  std::vector<double> values;

  SampledFunction(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    detail::require(values.size() == grid.size(), "sampled function: value count does not match grid");
  }

  explicit SampledFunction(Grid g) : grid(std::move(g)), values(grid.size(), 0.0) {}
};

/// Samples an arbitrary function of a point on every grid node.
template <class F>
SampledFunction sample(const Grid& grid, F&& fn) {
  SampledFunction out(grid);
  std::vector<double> x(grid.dims());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    out.values[i] = fn(std::span<const double>(x));
  }
  return out;
}

/// Fixed-tree (pairwise) summation; result is independent of thread count and stable across runs.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

struct GridNorms {
  double l2 = 0.0;
  double sup = 0.0;
};

/// Discrete L2 (left Riemann sum over cells) and sup (all nodes) norms of f - g.
inline GridNorms grid_norms(const SampledFunction& f, const SampledFunction& g) {
  if (!(f.grid == g.grid)) throw ValidationError("grid_norms: grids differ");
  std::vector<double> sq(f.values.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double diff = f.values[i] - g.values[i];
    sq[i] = f.grid.is_cell_corner(i) ? diff * diff : 0.0;
    sup = std::max(sup, std::abs(diff));
  }
  return {std::sqrt(f.grid.cell_weight() * pairwise_sum(sq)), sup};
}

/// Discrete L2 norm of a single sampled function.
inline double grid_l2(const SampledFunction& f) {
  std::vector<double> sq(f.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = f.grid.is_cell_corner(i) ? f.values[i] * f.values[i] : 0.0;
  return std::sqrt(f.grid.cell_weight() * pairwise_sum(sq));
}

/// Discrete L2 inner product with the same cell-corner quadrature as grid_norms.
inline double grid_inner(const SampledFunction& f, const SampledFunction& g) {
  if (!(f.grid == g.grid)) throw ValidationError("grid_inner: grids differ");
  std::vector<double> p(f.values.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = f.grid.is_cell_corner(i) ? f.values[i] * g.values[i] : 0.0;
  return f.grid.cell_weight() * pairwise_sum(p);
}

}  // namespace sparsenet

#endif  // SPARSENET_GRID_HPP
