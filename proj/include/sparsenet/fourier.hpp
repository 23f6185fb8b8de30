#ifndef SPARSENET_FOURIER_HPP
#define SPARSENET_FOURIER_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sparsenet/error.hpp"
#include "sparsenet/grid.hpp"

namespace sparsenet {

/// n points evenly spaced on [lo, hi].
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  detail::require(n >= 2 && hi > lo, "linspace: need n >= 2 and hi > lo");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

/**
 * |f^(xi)| with f^(xi) = int f(x) e^{-2 pi i <x, xi>} dx for a 2-D function supported in `support`,
 * by the trapezoid rule on nodes x nodes points. Rows follow xi1, columns xi2.
 */
template <class F>
Eigen::MatrixXd fourier_magnitude_2d(F&& f, const Box& support, std::size_t nodes, std::span<const double> xi1,
                                     std::span<const double> xi2) {
  detail::require(support.size() == 2, "fourier: support must be two-dimensional");
  detail::require(nodes >= 2 && !xi1.empty() && !xi2.empty(), "fourier: need nodes and frequencies");
  const auto x1 = linspace(support[0].lo, support[0].hi, nodes);
  const auto x2 = linspace(support[1].lo, support[1].hi, nodes);
  const auto n = static_cast<Eigen::Index>(nodes);
  Eigen::MatrixXd samples(n, n);
  std::vector<double> x(2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      x[0] = x1[static_cast<std::size_t>(i)];
      x[1] = x2[static_cast<std::size_t>(j)];
      const double wi = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
      const double wj = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
      samples(i, j) = wi * wj * f(std::span<const double>(x));
    }
  }
  auto kernel = [&](std::span<const double> xi, const std::vector<double>& pts) {
    Eigen::MatrixXcd e(static_cast<Eigen::Index>(xi.size()), n);
    for (std::size_t a = 0; a < xi.size(); ++a) {
      for (std::size_t b = 0; b < pts.size(); ++b) {
        e(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            std::polar(1.0, -2.0 * std::numbers::pi * xi[a] * pts[b]);
      }
    }
    return e;
  };
  const double h1 = support[0].length() / static_cast<double>(nodes - 1);
  const double h2 = support[1].length() / static_cast<double>(nodes - 1);
  const Eigen::MatrixXcd e1 = kernel(xi1, x1);
  const Eigen::MatrixXcd e2 = kernel(xi2, x2);
  const Eigen::MatrixXcd out = e1 * samples.cast<std::complex<double>>() * e2.transpose();
  return out.cwiseAbs() * (h1 * h2);
}

}  // namespace sparsenet

#endif  // SPARSENET_FOURIER_HPP
