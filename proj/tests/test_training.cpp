#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sparsenet/network_ops.hpp"
#include "sparsenet/training.hpp"

using namespace sparsenet;

namespace {

BumpModel identity_model() {
  BumpModel m;
  m.subnets.push_back(bump_subnet(Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), 1.0));
  return m;
}

}  // namespace

TEST(BumpModel, IdentityInitIsTheBump) {
  const BumpModel m = identity_model();
  const Network ref = bump_network(Activation::relu(), 2, 1.0, 1.0, 2.0);
  EXPECT_EQ(m.to_network(), ref);
  const Grid g = Grid::cube(2, -0.5, 2.5, 31);
  const auto a = sample_model(m, g);
  const auto b = sample_network(ref, g);
  EXPECT_LE(grid_norms(a, b).sup, 1e-14);
}

TEST(BumpModel, ParametersRoundTripAndEdges) {
  BumpModel m = build_fixed_topology(5, 3);
  EXPECT_EQ(m.parameter_count(), 5 * 19 + 1u);
  auto p = m.parameters();
  BumpModel copy = build_fixed_topology(5, 4);
  copy.set_parameters(p);
  EXPECT_EQ(copy.parameters(), p);
  EXPECT_EQ(m.to_network().connectivity(), fixed_topology_edges(5));
  EXPECT_EQ(fixed_topology_edges(1), 19u);
  // Network and direct evaluation agree.
  const Grid g = Grid::cube(2, -1.0, 1.0, 17);
  EXPECT_LE(grid_norms(sample_model(m, g), sample_network(m.to_network(), g)).sup, 1e-12);
}

TEST(Training, GradientMatchesFiniteDifferences) {
  BumpModel m = build_fixed_topology(3, 11);
  const auto target = line_singularity_target(0.5, 0.0, training_grid(10));
  const auto samples = grid_samples(target);
  std::mt19937_64 rng(5);
  std::vector<double> grad, g2;
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 100; ++trial) {
    const std::span<const Sample> pt(&samples[rng() % samples.size()], 1);
    const std::size_t p = rng() % m.parameter_count();
    const double h = 1e-5;
    if (min_abs_preactivation(m, pt) <= 1e-3) continue;
    loss_and_gradient(m, pt, grad);
    auto params = m.parameters();
    BumpModel plus = m, minus = m;
    params[p] += h;
    plus.set_parameters(params);
    params[p] -= 2 * h;
    minus.set_parameters(params);
    if (min_abs_preactivation(plus, pt) <= 1e-3 || min_abs_preactivation(minus, pt) <= 1e-3) continue;
    const double fd = (loss_and_gradient(plus, pt, g2) - loss_and_gradient(minus, pt, g2)) / (2 * h);
    EXPECT_NEAR(grad[p], fd, 1e-4 * std::max(1.0, std::abs(fd))) << "parameter " << p;
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

TEST(Training, LossDecreasesAndLayerTwoIsFrozen) {
  BumpModel m = build_fixed_topology(8, 2);
  const Network before = m.to_network();
  const auto target = line_singularity_target(std::numbers::pi / 6, 0.0, training_grid(24));
  TrainConfig cfg;
  cfg.epochs = 30;
  const LossTrace t = sgd_train(m, target, cfg);
  ASSERT_EQ(t.epoch_loss.size(), 30u);
  EXPECT_LT(t.epoch_loss.back(), t.epoch_loss.front());
  EXPECT_EQ(m.to_network().layer(1), before.layer(1));
  EXPECT_NE(m.to_network().layer(0), before.layer(0));
}

TEST(Training, SameSeedSameResult) {
  const auto target = line_singularity_target(0.3, 0.1, training_grid(16));
  TrainConfig cfg;
  cfg.epochs = 5;
  BumpModel a = build_fixed_topology(4, 9), b = build_fixed_topology(4, 9);
  sgd_train(a, target, cfg);
  sgd_train(b, target, cfg);
  EXPECT_EQ(a.parameters(), b.parameters());
}

TEST(Training, DivergenceIsReported) {
  BumpModel m = build_fixed_topology(4, 1);
  const auto target = line_singularity_target(0.3, 0.0, training_grid(16));
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.learning_rate = 1e6;
  try {
    sgd_train(m, target, cfg);
    FAIL() << "expected divergence";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(Training, ZeroLearningRateKeepsParameters) {
  BumpModel m = build_fixed_topology(3, 1);
  const auto p = m.parameters();
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.learning_rate = 0.0;
  sgd_train(m, line_singularity_target(0.3, 0.0, training_grid(8)), cfg);
  EXPECT_EQ(m.parameters(), p);
}

TEST(Selection, TopSubnetworksByMagnitude) {
  const BumpModel m = build_fixed_topology(5, 7);
  Eigen::VectorXd c(5);
  c << 0.1, -0.9, 0.5, 0.0, 0.5;
  const BumpModel top = select_top_subnetworks(m, c, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top.subnets[0].w1, m.subnets[1].w1);
  EXPECT_EQ(top.subnets[0].c, -0.9);
  EXPECT_EQ(top.subnets[1].w1, m.subnets[2].w1);  // tie goes to the lower index
  EXPECT_EQ(select_top_subnetworks(m, c, 0).size(), 0u);
  EXPECT_EQ(model_edges(select_top_subnetworks(m, c, 0)), 0u);
  EXPECT_THROW(select_top_subnetworks(m, c, 6), ValidationError);
  // a zero weight contributes no edges
  EXPECT_EQ(model_edges(select_top_subnetworks(m, c, 5)), 4 * 19u);
}

TEST(Experiment, ConfigRoundTripAndErrors) {
  ExperimentConfig cfg;
  cfg.target = TargetKind::cartoon;
  cfg.sizes = {8, 16, 32};
  cfg.subnetworks = 64;
  cfg.train.learning_rate = 0.02;
  cfg.refit = true;
  const auto back = experiment_config_from_text(experiment_config_to_text(cfg));
  EXPECT_EQ(experiment_config_to_text(back), experiment_config_to_text(cfg));
  EXPECT_THROW(experiment_config_from_text("target square\n"), ParseError);
  EXPECT_THROW(experiment_config_from_text("bogus 1\n"), ParseError);
  EXPECT_THROW(experiment_config_from_text("refit yes\n"), ParseError);
  EXPECT_TRUE(back.refit);
  EXPECT_FALSE(ExperimentConfig{}.refit);
  EXPECT_THROW(experiment_config_from_text("sizes 4,2\n"), ValidationError);
  try {
    experiment_config_from_text("epochs 3\nlr abc\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 2u);
  }
}

TEST(Experiment, LineSweepProducesSortedRows) {
  ExperimentConfig cfg;
  cfg.sizes = {2, 4};
  cfg.train.epochs = 3;
  cfg.train.grid_n = 16;
  const auto r = error_vs_edges_experiment(cfg);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_LE(r.rows[0].edges, r.rows[1].edges);
  EXPECT_LE(r.rows[1].edges, fixed_topology_edges(4));
  EXPECT_EQ(r.csv().substr(0, 26), "edges,l2_error,epochs,seed");
  EXPECT_EQ(r.csv(), error_vs_edges_experiment(cfg).csv());
}

TEST(Experiment, CartoonSweepUsesLasso) {
  ExperimentConfig cfg;
  cfg.target = TargetKind::cartoon;
  cfg.sizes = {2, 4, 8};
  cfg.subnetworks = 16;
  cfg.train.epochs = 2;
  cfg.train.grid_n = 16;
  cfg.lambda_path = 10;
  const auto r = error_vs_edges_experiment(cfg);
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) EXPECT_LE(row.edges, 8 * 19u);
  EXPECT_GT(r.lambda, 0.0);
}

TEST(Experiment, RefitNeverIncreasesSweepError) {
  ExperimentConfig cfg;
  cfg.target = TargetKind::cartoon;
  cfg.sizes = {2, 4, 8};
  cfg.subnetworks = 16;
  cfg.train.epochs = 2;
  cfg.train.grid_n = 16;
  cfg.lambda_path = 10;
  const auto plain = error_vs_edges_experiment(cfg);
  cfg.refit = true;
  const auto refit = error_vs_edges_experiment(cfg);
  ASSERT_EQ(plain.rows.size(), refit.rows.size());
  for (std::size_t i = 0; i < plain.rows.size(); ++i) {
    EXPECT_LE(refit.rows[i].l2_error, plain.rows[i].l2_error + 1e-12);
  }
}

TEST(Experiment, SemilogCurvatureSign) {
  ExperimentResult r;
  for (std::size_t e : {10u, 20u, 30u, 40u}) {
    const double x = static_cast<double>(e);
    r.rows.push_back({e, std::exp(-0.01 * x * x), 1, 1});
  }
  EXPECT_NEAR(r.semilog_curvature(), -0.01, 1e-9);
  for (auto& row : r.rows) row.l2_error = std::exp(-0.1 * static_cast<double>(row.edges));
  EXPECT_NEAR(r.semilog_curvature(), 0.0, 1e-9);
  r.rows.resize(2);
  EXPECT_TRUE(std::isnan(r.semilog_curvature()));
}
