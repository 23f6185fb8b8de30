#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "sparsenet/approx.hpp"
#include "sparsenet/shearlet.hpp"

using namespace sparsenet;

namespace {

ShearletParams small_params() {
  ShearletParams p;
  p.max_scale = 2;
  p.delta = 0.25;
  return p;
}

}  // namespace

TEST(ShearMatrices, DilationShearSwap) {
  const ShearMatrices m = shear_matrices(0.5, 4.0, 0);
  EXPECT_DOUBLE_EQ(m.dilation(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(m.dilation(1, 1), 2.0);
  EXPECT_DOUBLE_EQ(m.dilation(0, 1), 0.0);
  EXPECT_TRUE(m.shear.isIdentity());
  EXPECT_TRUE((m.swap * m.swap).isIdentity());
  const ShearMatrices s = shear_matrices(0.5, 1.0, -3);
  EXPECT_DOUBLE_EQ(s.shear(0, 1), -3.0);
}

TEST(ShearMatrices, ShearRangeCounts) {
  EXPECT_EQ(2 * shear_range(0.5, 2) + 1, 5);
  EXPECT_EQ(2 * shear_range(1.0, 3) + 1, 3);
  EXPECT_EQ(shear_range(0.0, 3), 8);
  for (int l = 0; l <= 4; ++l) {
    int count = 0;
    for (int k = -100; k <= 100; ++k) {
      if (std::abs(k) <= std::ceil(std::pow(2.0, l * 0.5))) ++count;
    }
    EXPECT_EQ(2 * shear_range(0.5, l) + 1, count) << "l=" << l;
  }
}

TEST(ShearletSystem, MatrixCountAndDeterminants) {
  const AffineSystem sys = make_shearlet_system(small_params());
  std::size_t expected = 1;
  for (int l = 0; l <= 2; ++l) expected += 2 * (2 * shear_range(0.5, l) + 1);
  EXPECT_EQ(sys.matrices().size(), expected);
  for (std::size_t j = 1; j < sys.matrices().size(); ++j) {
    const int l = sys.labels()[j].scale;
    EXPECT_NEAR(sys.det(j), std::pow(2.0, 1.5 * l), 1e-12);
  }
  // At l = 2 atoms carry the factor 2^{l(1+alpha)/2} = 2^{1.5}.
  const auto it = std::find_if(sys.labels().begin(), sys.labels().end(), [](const MatrixLabel& m) { return m.scale == 2; });
  ASSERT_NE(it, sys.labels().end());
  const std::size_t j = static_cast<std::size_t>(it - sys.labels().begin());
  EXPECT_NEAR(std::sqrt(sys.det(j)), 2.8284271247, 1e-9);
  const std::vector<double> x{0.3, 0.2};
  const Atom atom{1, static_cast<std::uint32_t>(j), {0, 0}};
  Eigen::Vector2d y = sys.matrices()[j] * Eigen::Vector2d(x[0], x[1]);
  const std::vector<double> yv{y(0), y(1)};
  EXPECT_NEAR(sys.atom_value(atom, x), std::pow(2.0, 1.5) * sys.variants()[1].evaluate(sys.generator(), yv), 1e-12);
}

TEST(ShearletSystem, EigenvalueBelowOneIsReportedAtCoarsestScale) {
  const AffineSystem sys = make_shearlet_system(small_params());
  // S_{+-1} J has eigenvalues (1 +- sqrt 5) / 2.
  EXPECT_NEAR(sys.min_eigenvalue_magnitude(), (std::sqrt(5.0) - 1.0) / 2.0, 1e-9);
  EXPECT_GT(sys.determinant_growth_constant(1.0), 0.0);
}

TEST(ShearletSystem, AtomCountGrowsWithDeterminant) {
  const AffineSystem sys = make_shearlet_system(small_params());
  const auto atoms = enumerate_atoms(sys);
  const double c = sys.occupancy_constant(atoms);
  EXPECT_GT(c, 0.0);
  std::vector<std::size_t> counts(sys.matrices().size(), 0);
  for (const auto& a : atoms) ++counts[a.matrix];
  for (std::size_t j = 0; j < counts.size(); ++j) EXPECT_GE(static_cast<double>(counts[j]), c * sys.det(j) - 1e-9);
  // dropping every atom of one matrix sends it to zero
  std::vector<Atom> partial;
  for (const auto& a : atoms) {
    if (a.matrix != 0) partial.push_back(a);
  }
  EXPECT_EQ(sys.occupancy_constant(partial), 0.0);
}

TEST(AffineSystem, RejectsDecreasingDeterminants) {
  const Generator f = Generator::from_bump(Bump(BumpShape{}));
  std::vector<Eigen::MatrixXd> mats{2.0 * Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity()};
  EXPECT_THROW(AffineSystem(f, {TranslateCombination::identity(2)}, mats, {{0, 0}}, 0.5,
                            Box{Interval{0, 1}, Interval{0, 1}}),
               ValidationError);
  std::vector<Eigen::MatrixXd> singular{Eigen::Matrix2d::Zero()};
  EXPECT_THROW(AffineSystem(f, {TranslateCombination::identity(2)}, singular, {{0, 0}}, 0.5,
                            Box{Interval{0, 1}, Interval{0, 1}}),
               ValidationError);
}

TEST(CanonicalOrder, CoarseBeforeFineIdempotentAndPermutationInvariant) {
  const AffineSystem sys = make_shearlet_system(small_params());
  const std::vector<Atom> atoms = enumerate_atoms(sys);
  ASSERT_GT(atoms.size(), 10u);
  for (std::size_t i = 1; i < atoms.size(); ++i) EXPECT_LE(sys.det(atoms[i - 1].matrix), sys.det(atoms[i].matrix));
  EXPECT_EQ(canonical_order(sys, atoms), atoms);
  std::vector<Atom> shuffled = atoms;
  std::mt19937_64 rng(5);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  EXPECT_EQ(canonical_order(sys, shuffled), atoms);
}

TEST(EnumerateAtoms, MatchesBruteForceSupportTest) {
  // Every atom with a nonzero sample in the open domain must be enumerated.
  ShearletParams p = small_params();
  p.max_scale = 1;
  const AffineSystem sys = make_shearlet_system(p);
  const std::vector<Atom> atoms = enumerate_atoms(sys);
  const Grid grid = Grid::cube(2, 0.0, 1.0, 41);
  for (const auto& block : sys.blocks()) {
    const auto range = sys.translation_range(block);
    for (std::int64_t b0 = range[0].first - 3; b0 <= range[0].second + 3; ++b0) {
      for (std::int64_t b1 = range[1].first - 3; b1 <= range[1].second + 3; ++b1) {
        const Atom a{static_cast<std::uint32_t>(block.variant), static_cast<std::uint32_t>(block.matrix), {b0, b1}};
        const SampledFunction s = atom_evaluate(a, sys, grid);
        const bool nonzero = std::any_of(s.values.begin(), s.values.end(), [](double v) { return v != 0.0; });
        if (nonzero) {
          EXPECT_NE(std::find(atoms.begin(), atoms.end(), a), atoms.end()) << b0 << "," << b1;
        }
      }
    }
  }
}

TEST(AtomEvaluate, IdentityAtomMatchesGenerator) {
  const Generator f = Generator::from_bump(Bump(BumpShape{}));
  const AffineSystem sys(f, {TranslateCombination::identity(2)}, {Eigen::Matrix2d::Identity()}, {{0, 0}}, 0.5,
                         Box{Interval{-1, 3}, Interval{-1, 3}});
  const Grid grid = Grid::cube(2, -1.0, 3.0, 33);
  const SampledFunction direct = sample(grid, [&](std::span<const double> x) { return f(x); });
  const SampledFunction atom = atom_evaluate(Atom{0, 0, {0, 0}}, sys, grid);
  EXPECT_EQ(direct.values, atom.values);
  // Translation by delta * b = (0.5, 1).
  const SampledFunction shifted = atom_evaluate(Atom{0, 0, {1, 2}}, sys, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.point(i);
    const std::vector<double> y{x[0] - 0.5, x[1] - 1.0};
    EXPECT_DOUBLE_EQ(shifted.values[i], f(y));
  }
}

TEST(AtomSamples, SparseSamplesMatchDenseEvaluation) {
  const AffineSystem sys = make_shearlet_system(small_params());
  const std::vector<Atom> atoms = enumerate_atoms(sys);
  const Grid grid = Grid::cube(2, 0.0, 1.0, 65);
  for (std::size_t i = 0; i < atoms.size(); i += 7) {
    const SampledFunction dense = atom_evaluate(atoms[i], sys, grid);
    SampledFunction from_sparse(grid);
    const SparseSamples s = atom_samples(atoms[i], sys, grid);
    for (std::size_t k = 0; k < s.index.size(); ++k) from_sparse.values[s.index[k]] = s.value[k];
    EXPECT_EQ(dense.values, from_sparse.values) << "atom " << i;
  }
}

TEST(AtomStatistics, PixelDrivenEngineMatchesPerAtomQuadrature) {
  const AffineSystem sys = make_shearlet_system(small_params());
  const std::vector<Atom> atoms = enumerate_atoms(sys);
  const Grid grid = Grid::cube(2, 0.0, 1.0, 65);
  const SampledFunction target =
      sample(grid, [](std::span<const double> x) { return std::sin(3.0 * x[0]) + x[1] * x[1]; });
  const AtomStatistics stats = analyze_atoms(target, sys, atoms);
  for (std::size_t i = 0; i < atoms.size(); i += 3) {
    const SampledFunction a = atom_evaluate(atoms[i], sys, grid);
    EXPECT_NEAR(stats.coefficients[i], grid_inner(target, a), 1e-12) << i;
    EXPECT_NEAR(stats.norms[i], grid_l2(a), 1e-12) << i;
  }
}

TEST(AtomStatistics, InteriorAtomsHaveNearUnitScaledNorm) {
  // ||atom|| = ||g_s||_2 for atoms fully inside the domain, up to quadrature error.
  ShearletParams p = small_params();
  p.spacing_inverse = p.bump.scale;  // taps 1/B apart: cone atoms fit inside at scale 2
  const AffineSystem sys = make_shearlet_system(p);
  const Generator& f = sys.generator();
  const Grid fine = Grid::cube(2, 0.0, 1.0, 513);
  const TranslateCombination& cone = sys.variants()[1];
  const Box sup = cone.support(f);
  const Grid ref = Grid(sup, 1025);
  const double gnorm = grid_l2(sample(ref, [&](std::span<const double> x) { return cone.evaluate(f, x); }));
  const std::vector<Atom> atoms = enumerate_atoms(sys);
  int checked = 0;
  for (const Atom& a : atoms) {
    if (a.variant != 1) continue;
    const Box bb = sys.atom_bounding_box(a);
    if (bb[0].lo < 0.0 || bb[1].lo < 0.0 || bb[0].hi > 1.0 || bb[1].hi > 1.0) continue;
    EXPECT_NEAR(grid_l2(atom_evaluate(a, sys, fine)) / gnorm, 1.0, 0.01);
    if (++checked == 5) break;
  }
  EXPECT_GT(checked, 0);
}

TEST(AffineSystem, TranslationsBoundedByConstantTimesMatrixNorm) {
  const AffineSystem sys = make_shearlet_system(small_params());
  const double cb = sys.translation_bound_constant();
  for (const Atom& a : enumerate_atoms(sys)) {
    const double bn = static_cast<double>(std::max(std::abs(a.translation[0]), std::abs(a.translation[1])));
    EXPECT_LE(bn, cb * AffineSystem::infinity_norm(sys.matrices()[a.matrix]) + 1.0);
  }
}

TEST(VanishingMoments, BinomialCoefficients) {
  const Generator f = Generator::from_bump(Bump(BumpShape{}));
  const TranslateCombination g = make_vanishing_moments(f, 7, 1.0, 0);
  const std::vector<double> expected{1, -6, 15, -20, 15, -6, 1};
  ASSERT_EQ(g.size(), 7u);
  for (std::size_t l = 0; l < 7; ++l) {
    EXPECT_DOUBLE_EQ(g.terms()[l].coefficient, expected[l]);
    EXPECT_DOUBLE_EQ(g.terms()[l].shift[0], static_cast<double>(l));
    EXPECT_DOUBLE_EQ(g.terms()[l].shift[1], 0.0);
  }
  const TranslateCombination one = make_vanishing_moments(f, 1, 1.0, 0);
  const std::vector<double> x{0.7, 0.4};
  EXPECT_DOUBLE_EQ(one.evaluate(f, x), f(x));
  EXPECT_THROW(make_vanishing_moments(f, 0, 1.0, 0), ValidationError);
}

TEST(VanishingMoments, OneDimensionalHatDifferenceHasZeroIntegral) {
  const Generator f = Generator::from_bump(Bump(BumpShape{Activation::relu(), 1, 1.0, 1.0, 2.0, 1.0}));
  const TranslateCombination g = make_vanishing_moments(f, 2, 2.0, 0);
  const std::vector<double> base{0.0};
  const auto m = directional_moments([&](std::span<const double> x) { return g.evaluate(f, x); }, base, 0, 0.0, 2.5,
                                     4096, 1);
  EXPECT_NEAR(m[0], 0.0, 1e-12);
  EXPECT_GT(std::abs(m[1]), 1e-3);
}

TEST(VanishingMoments, TapCountControlsOrder) {
  // R taps annihilate moments of order 0..R-2; order R-1 survives.
  const Generator f = Generator::from_bump(Bump(BumpShape{}));
  for (std::size_t taps : {3u, 5u, 8u}) {
    const double b = 3.75;
    const TranslateCombination g = make_vanishing_moments(f, taps, b, 0);
    const Box s = g.support(f);
    // Node spacing is a divisor of the tap spacing, so the discrete sum is exactly shift invariant.
    const double h = 1.0 / (b * 64.0);
    const std::size_t nodes = static_cast<std::size_t>(std::llround(s[0].length() / h)) + 1;
    const std::vector<double> base{0.0, 0.21};
    const auto m = directional_moments([&](std::span<const double> x) { return g.evaluate(f, x); }, base, 0, s[0].lo,
                                       s[0].lo + h * static_cast<double>(nodes - 1), nodes, taps - 1);
    const auto abs_m = directional_moments([&](std::span<const double> x) { return std::abs(g.evaluate(f, x)); }, base,
                                           0, s[0].lo, s[0].lo + h * static_cast<double>(nodes - 1), nodes, 0);
    const double scale = abs_m[0];
    for (std::size_t p = 0; p + 1 < taps; ++p) EXPECT_LE(std::abs(m[p]), 1e-9 * scale) << taps << " order " << p;
    EXPECT_GT(std::abs(m[taps - 1]), 1e-6 * scale) << taps;
  }
}
