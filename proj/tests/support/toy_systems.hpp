#ifndef SPARSENET_TESTS_TOY_SYSTEMS_HPP
#define SPARSENET_TESTS_TOY_SYSTEMS_HPP

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sparsenet/affine_system.hpp"
#include "sparsenet/generator.hpp"
#include "sparsenet/grid.hpp"
#include "sparsenet/shearlet.hpp"

namespace sparsenet::fixtures {

/**
 * count translates of the unit ReLU bump in d dimensions with delta = spacing, identity matrix.
 * spacing 2 (the support width) makes the atoms pairwise orthogonal; smaller spacing makes them overlap.
 */
inline AffineSystem toy_system(std::size_t d, std::size_t count, double spacing = 2.0) {
  const Generator g = Generator::from_bump(Bump(BumpShape{Activation::relu(), d, 1.0, 1.0, 2.0, 1.0}));
  Box domain(d, Interval{0.0, 2.0});
  domain[0].hi = spacing * static_cast<double>(count - 1) + 2.0;
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  return AffineSystem(g, {TranslateCombination::identity(d)}, {id}, {{0, 0}}, spacing, domain);
}

/// Grid on the system domain with 8 cells per unit length along dimension 0.
inline Grid toy_grid(const AffineSystem& sys, std::size_t n = 0) {
  if (n == 0) n = static_cast<std::size_t>(sys.domain()[0].length() * 8.0) + 1;
  return Grid(sys.domain(), n);
}

inline SampledFunction random_target(const Grid& grid, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  SampledFunction f(grid);
  for (double& v : f.values) v = n(rng);
  return f;
}

/// A small shearlet system on [0, 1]^2 for fast tests.
inline ShearletParams small_shearlets() {
  ShearletParams p;
  p.max_scale = 2;
  // compact cone generator so coarse cone atoms fit inside the unit square
  p.spacing_inverse = p.bump.scale;
  return p;
}

}  // namespace sparsenet::fixtures

#endif  // SPARSENET_TESTS_TOY_SYSTEMS_HPP
