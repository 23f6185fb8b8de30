#include <gtest/gtest.h>

#include <cmath>

#include "sparsenet/approx.hpp"
#include "sparsenet/cartoon.hpp"
#include "sparsenet/shearlet.hpp"
#include "support/toy_systems.hpp"

using namespace sparsenet;
using namespace sparsenet::fixtures;

TEST(EstimateRate, ExactPowerLaws) {
  auto f = estimate_rate({{1, 1}, {2, 0.5}, {4, 0.25}});
  EXPECT_NEAR(f.gamma(), 1.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(estimate_rate({{2, 0.25}, {4, 0.0625}, {8, 0.015625}}).gamma(), 2.0, 1e-12);
  auto flat = estimate_rate({{1, 0.3}, {2, 0.3}, {4, 0.3}});
  EXPECT_EQ(flat.gamma(), 0.0);
}

TEST(EstimateRate, RejectsBadInput) {
  EXPECT_THROW(estimate_rate({{1, 1}, {2, 0.5}}), ValidationError);
  EXPECT_THROW(estimate_rate({{1, 1}, {2, 0.0}, {4, 0.1}}), ValidationError);
  EXPECT_THROW(estimate_rate({{1, 1}, {1, 0.5}, {4, 0.1}}), ValidationError);
  EXPECT_THROW(estimate_rate({{4, 1}, {2, 0.5}, {8, 0.1}}), ValidationError);
}

TEST(MTerm, OrthogonalToySystemMatchesExhaustiveSearch) {
  for (std::size_t d : {1u, 2u}) {
    const AffineSystem sys = toy_system(d, d == 1 ? 10 : 6);
    const auto atoms = enumerate_atoms(sys);
    ASSERT_EQ(atoms.size(), d == 1 ? 10u : 6u);
    const Grid grid = toy_grid(sys, d == 1 ? 0 : 41);
    for (unsigned seed = 1; seed <= 3; ++seed) {
      const auto target = random_target(grid, seed);
      const auto stats = analyze_atoms(target, sys, atoms);
      for (std::size_t m = 0; m <= 4; ++m) {
        const double greedy = m_term_approx(target, sys, atoms, stats, m, {}).residual;
        EXPECT_NEAR(greedy, exhaustive_m_term_residual(target, sys, atoms, m), 1e-9) << "d=" << d << " m=" << m;
      }
    }
  }
}

TEST(MTerm, CoherentToySystemStaysClose) {
  const AffineSystem sys = toy_system(1, 9, 1.0);
  const auto atoms = enumerate_atoms(sys);
  const auto target = random_target(toy_grid(sys), 4);
  const auto stats = analyze_atoms(target, sys, atoms);
  for (std::size_t m = 1; m <= 4; ++m) {
    const double greedy = m_term_approx(target, sys, atoms, stats, m, {}).residual;
    const double best = exhaustive_m_term_residual(target, sys, atoms, m);
    EXPECT_GE(greedy, best - 1e-12);
    RecordProperty("ratio_m" + std::to_string(m), std::to_string(greedy / best));
  }
}

class ShearletApprox : public ::testing::Test {
 protected:
  void SetUp() override {
    sys_ = std::make_unique<AffineSystem>(make_shearlet_system(small_shearlets()));
    atoms_ = enumerate_atoms(*sys_);
    target_ = std::make_unique<SampledFunction>(sample_cartoon(generate_cartoon({}), Grid::cube(2, 0, 1, 65)));
    stats_ = analyze_atoms(*target_, *sys_, atoms_);
  }
  std::unique_ptr<AffineSystem> sys_;
  std::vector<Atom> atoms_;
  std::unique_ptr<SampledFunction> target_;
  AtomStatistics stats_;
};

TEST_F(ShearletApprox, ResidualNonIncreasingAndRefitHelps) {
  double prev = grid_l2(*target_);
  EXPECT_EQ(m_term_approx(*target_, *sys_, atoms_, stats_, 0, {}).residual, prev);
  MTermOptions plain;
  plain.refit = false;
  for (std::size_t m : {1u, 2u, 4u, 8u, 16u, 32u, 64u}) {
    const Expansion e = m_term_approx(*target_, *sys_, atoms_, stats_, m, {});
    EXPECT_LE(e.residual, prev * (1 + 1e-12)) << m;
    EXPECT_LE(e.residual, m_term_approx(*target_, *sys_, atoms_, stats_, m, plain).residual * (1 + 1e-12));
    EXPECT_EQ(e.terms.size(), m);
    prev = e.residual;
  }
}

TEST_F(ShearletApprox, SearchDepthLimitsCandidates) {
  MTermOptions o;
  o.search_depth = 20;
  const Expansion e = m_term_approx(*target_, *sys_, atoms_, stats_, 5, o);
  for (const auto& t : e.terms) EXPECT_LT(t.atom, 20u);
  o.search_depth = 3;
  EXPECT_THROW(m_term_approx(*target_, *sys_, atoms_, stats_, 5, o), ValidationError);
  EXPECT_EQ(default_search_depth(3), 576u);
}

TEST_F(ShearletApprox, Deterministic) {
  const Expansion a = m_term_approx(*target_, *sys_, atoms_, stats_, 16, {});
  const Expansion b = m_term_approx(*target_, *sys_, atoms_, stats_, 16, {});
  ASSERT_EQ(a.terms.size(), b.terms.size());
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    EXPECT_EQ(a.terms[i].atom, b.terms[i].atom);
    EXPECT_EQ(a.terms[i].coefficient, b.terms[i].coefficient);
  }
  EXPECT_EQ(a.residual, b.residual);
}

TEST_F(ShearletApprox, CoefficientBoundIsReported) {
  MTermOptions o;
  o.coefficient_bound = 1e-6;
  const Expansion e = m_term_approx(*target_, *sys_, atoms_, stats_, 4, o);
  EXPECT_TRUE(e.coefficient_bound_exceeded);
  EXPECT_GT(e.max_abs_coefficient, 1e-6);
}
