#include <gtest/gtest.h>

#include <random>

#include "sparsenet/approx.hpp"
#include "sparsenet/cartoon.hpp"
#include "sparsenet/shearlet.hpp"
#include "support/toy_systems.hpp"

using namespace sparsenet;
using namespace sparsenet::fixtures;

TEST(Transfer, SingleLowpassAtomIsTheGenerator) {
  const AffineSystem sys = make_shearlet_system(small_shearlets());
  const std::vector<Atom> atoms{Atom{0, 0, {0, 0}}};
  Expansion exp;
  exp.terms.push_back({0, 1.0});
  const TransferResult tr = transfer_to_network(exp, sys, atoms);
  const Grid grid = Grid::cube(2, 0, 1, 65);
  const auto gen = sample(grid, [&](std::span<const double> x) { return sys.generator()(x); });
  EXPECT_LE(grid_norms(gen, sample_network(tr.net, grid)).sup, 1e-12);
  EXPECT_EQ(tr.connectivity, tr.net.connectivity());
  EXPECT_EQ(tr.connectivity, sys.generator().network()->connectivity());
  EXPECT_LE(tr.connectivity, tr.per_atom_edges + 1);
}

TEST(Transfer, ZeroCoefficientAddsNoEdges) {
  const AffineSystem sys = make_shearlet_system(small_shearlets());
  const auto atoms = enumerate_atoms(sys);
  Expansion a, b;
  a.terms = {{3, 0.5}, {40, -1.25}};
  b.terms = {{3, 0.5}, {17, 0.0}, {40, -1.25}};
  EXPECT_EQ(transfer_to_network(a, sys, atoms).connectivity, transfer_to_network(b, sys, atoms).connectivity);
  Expansion empty;
  const TransferResult z = transfer_to_network(empty, sys, atoms);
  EXPECT_EQ(z.connectivity, 0u);
  EXPECT_EQ(z.net.eval_scalar(std::vector<double>{0.3, 0.3}), 0.0);
}

TEST(Transfer, ShearletExpansionIsReproducedExactly) {
  const AffineSystem sys = make_shearlet_system(small_shearlets());
  const auto atoms = enumerate_atoms(sys);
  const Grid grid = Grid::cube(2, 0, 1, 129);
  const auto target = sample_cartoon(generate_cartoon({}), grid);
  const auto stats = analyze_atoms(target, sys, atoms);
  const Expansion exp = m_term_approx(target, sys, atoms, stats, 10, {});
  const TransferResult tr = transfer_to_network(exp, sys, atoms);
  EXPECT_LE(grid_norms(synthesize(exp, sys, atoms, grid), sample_network(tr.net, grid)).l2, 1e-9);
  EXPECT_EQ(tr.connectivity, tr.net.connectivity());
  EXPECT_LE(tr.connectivity, (tr.per_atom_edges + 1) * exp.terms.size());
}

TEST(Transfer, RandomExpansionsStayWithinEdgeBound) {
  const AffineSystem sys = make_shearlet_system(small_shearlets());
  const auto atoms = enumerate_atoms(sys);
  const Grid grid = Grid::cube(2, 0, 1, 65);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    Expansion exp;
    const std::size_t m = 1 + rng() % 16;
    for (std::size_t k = 0; k < m; ++k) exp.terms.push_back({rng() % atoms.size(), std::ldexp(double(rng() % 200) - 100.0, -6)});
    const TransferResult tr = transfer_to_network(exp, sys, atoms);
    EXPECT_LE(tr.connectivity, (tr.per_atom_edges + 1) * m);
    EXPECT_LE(grid_norms(synthesize(exp, sys, atoms, grid), sample_network(tr.net, grid)).l2, 1e-9);
  }
}

TEST(Transfer, ToySystemIn1D) {
  const AffineSystem sys = toy_system(1, 5, 1.0);
  const auto atoms = enumerate_atoms(sys);
  Expansion exp;
  exp.terms = {{0, 1.0}, {2, -0.5}, {4, 2.0}};
  const TransferResult tr = transfer_to_network(exp, sys, atoms);
  const Grid grid = toy_grid(sys);
  EXPECT_LE(grid_norms(synthesize(exp, sys, atoms, grid), sample_network(tr.net, grid)).sup, 1e-12);
}
