#ifndef SPARSENET_SHEARLET_HPP
#define SPARSENET_SHEARLET_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "sparsenet/affine_system.hpp"
#include "sparsenet/error.hpp"
#include "sparsenet/generator.hpp"

namespace sparsenet {

struct ShearMatrices {
  Eigen::Matrix2d dilation;
  Eigen::Matrix2d shear;
  Eigen::Matrix2d swap;
};

/// D = diag(a, a^alpha), S_k = [[1, k], [0, 1]], J = [[0, 1], [1, 0]].
inline ShearMatrices shear_matrices(double alpha, double a, int k) {
  ShearMatrices m;
  m.dilation << a, 0.0, 0.0, std::pow(a, alpha);
  m.shear << 1.0, static_cast<double>(k), 0.0, 1.0;
  m.swap << 0.0, 1.0, 1.0, 0.0;
  return m;
}

/// Largest shear index at scale l: ceil(2^{l(1 - alpha)}).
inline int shear_range(double alpha, int scale) {
  return static_cast<int>(std::ceil(std::pow(2.0, scale * (1.0 - alpha)) - 1e-9));
}

/// Frequency half-width on which the unit ReLU bump's Fourier transform stays away from zero.
inline constexpr double kBumpFourierRadius = 0.8;

struct ShearletParams {
  double alpha = 0.5;
  double delta = 0.5;
  int max_scale = 6;
  /// Base bump g(2.5 x), supported on [0, 0.8]^2.
  BumpShape bump{Activation::relu(), 2, 1.0, 1.0, 2.0, 2.5};
  /// Number of translates in the cone generator (taps - 1 vanishing moments along x_1).
  std::size_t taps = 8;
  /// Inverse spacing B of the cone generator translates (taps sit 1/B apart).
  double spacing_inverse = 1.0;
  Box domain{Interval{0.0, 1.0}, Interval{0.0, 1.0}};

  void validate() const {
    detail::require(alpha >= 0.0 && alpha <= 1.0, "shearlets: alpha must lie in [0, 1]");
    detail::require(delta > 0.0 && std::isfinite(delta), "shearlets: delta must be > 0");
    detail::require(max_scale >= 0 && max_scale <= 16, "shearlets: max scale must lie in 0..16");
    detail::require(bump.dims == 2, "shearlets: generator must be two-dimensional");
    detail::require(taps >= 1, "shearlets: need at least one tap");
    detail::require(domain.size() == 2, "shearlets: domain must be two-dimensional");
  }
};

/// Lowpass generator f and cone generator g built from it.
struct ShearletGenerators {
  Generator lowpass;
  TranslateCombination cone;
};

inline ShearletGenerators make_shearlet_generators(const ShearletParams& p) {
  const Generator f = Generator::from_bump(Bump(p.bump));
  return {f, make_vanishing_moments(f, p.taps, p.spacing_inverse, 0, "cone")};
}

/**
 * Cone-adapted alpha-shearlet system as an affine system: variant 0 is the lowpass generator
 * with the identity matrix, variant 1 the cone generator with S_k D_{alpha, 2^l} J^tau.
 */
inline AffineSystem make_shearlet_system(const ShearletParams& p) {
  p.validate();
  auto gens = make_shearlet_generators(p);
  std::vector<Eigen::MatrixXd> matrices{Eigen::Matrix2d::Identity()};
  std::vector<MatrixLabel> labels{{"lowpass", 0, 0, 0}};
  std::vector<AffineBlock> blocks{{0, 0}};
  for (int l = 0; l <= p.max_scale; ++l) {
    const int kmax = shear_range(p.alpha, l);
    for (int tau = 0; tau <= 1; ++tau) {
      for (int k = -kmax; k <= kmax; ++k) {
        const ShearMatrices m = shear_matrices(p.alpha, std::ldexp(1.0, l), k);
        Eigen::Matrix2d a = m.shear * m.dilation;
        if (tau == 1) a = a * m.swap;
        blocks.push_back({1, matrices.size()});
        matrices.emplace_back(a);
        labels.push_back({"cone", l, k, tau});
      }
    }
  }
  return AffineSystem(gens.lowpass, {TranslateCombination::identity(2), gens.cone}, std::move(matrices),
                      std::move(blocks), p.delta, p.domain, std::move(labels));
}

}  // namespace sparsenet

#endif  // SPARSENET_SHEARLET_HPP
