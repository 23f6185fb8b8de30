#ifndef SPARSENET_TRAINING_HPP
#define SPARSENET_TRAINING_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sparsenet/activation.hpp"
#include "sparsenet/cartoon.hpp"
#include "sparsenet/error.hpp"
#include "sparsenet/format.hpp"
#include "sparsenet/grid.hpp"
#include "sparsenet/lasso.hpp"
#include "sparsenet/network.hpp"
#include "sparsenet/network_ops.hpp"

namespace sparsenet {

/// One bump subnetwork: six first-layer nodes rho(w . x + b), one frozen second-layer node, output weight c.
struct BumpSubnet {
  /// Row-major: node j = 3 * coordinate + shift index.
  std::array<double, 12> w1{};
  std::array<double, 6> b1{};
  double c = 0.0;

  static constexpr std::size_t kParams = 19;
};

/**
 * Sum of n_sub bump subnetworks on R^2 with ReLU. Layer 2 is fixed to the hat weights (1, -2, 1)
 * per coordinate and bias -1, so each subnetwork starts as g(A x + b) for some affine map.
 */
struct BumpModel {
  std::vector<BumpSubnet> subnets;
  double out_bias = 0.0;

  static constexpr std::array<double, 3> kShifts{0.0, 1.0, 2.0};
  static constexpr std::array<double, 3> kLayer2{1.0, -2.0, 1.0};
  static constexpr double kLayer2Bias = -1.0;

  std::size_t size() const noexcept { return subnets.size(); }
  std::size_t parameter_count() const noexcept { return subnets.size() * BumpSubnet::kParams + 1; }

  /// Subnetwork output z_k(x) before the output weight.
  double feature(std::size_t k, std::span<const double> x) const noexcept {
    const BumpSubnet& s = subnets[k];
    double z = kLayer2Bias;
    for (std::size_t j = 0; j < 6; ++j) {
      const double h = std::max(0.0, s.w1[2 * j] * x[0] + s.w1[2 * j + 1] * x[1] + s.b1[j]);
      z += kLayer2[j % 3] * h;
    }
    return std::max(0.0, z);
  }

  double operator()(std::span<const double> x) const noexcept {
    double out = out_bias;
    for (std::size_t k = 0; k < subnets.size(); ++k) {
      if (subnets[k].c != 0.0) out += subnets[k].c * feature(k, x);
    }
    return out;
  }

  Network to_network() const {
    const std::size_t n = subnets.size();
    std::vector<Entry> e1, e2, e3;
    std::vector<double> b1(6 * n), b2(n, kLayer2Bias);
    for (std::size_t k = 0; k < n; ++k) {
      const BumpSubnet& s = subnets[k];
      for (std::size_t j = 0; j < 6; ++j) {
        e1.push_back({6 * k + j, 0, s.w1[2 * j]});
        e1.push_back({6 * k + j, 1, s.w1[2 * j + 1]});
        b1[6 * k + j] = s.b1[j];
        e2.push_back({k, 6 * k + j, kLayer2[j % 3]});
      }
      e3.push_back({0, k, s.c});
    }
    std::vector<AffineLayer> layers;
    layers.emplace_back(6 * n, 2, std::move(e1), std::move(b1));
    layers.emplace_back(n, 6 * n, std::move(e2), std::move(b2));
    layers.emplace_back(1, n, std::move(e3), std::vector<double>{out_bias});
    return Network(2, std::move(layers), Activation::relu());
  }

  std::vector<double> parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    for (const auto& s : subnets) {
      p.insert(p.end(), s.w1.begin(), s.w1.end());
      p.insert(p.end(), s.b1.begin(), s.b1.end());
      p.push_back(s.c);
    }
    p.push_back(out_bias);
    return p;
  }

  void set_parameters(std::span<const double> p) {
    detail::require(p.size() == parameter_count(), "bump model: parameter count mismatch");
    std::size_t i = 0;
    for (auto& s : subnets) {
      for (double& v : s.w1) v = p[i++];
      for (double& v : s.b1) v = p[i++];
      s.c = p[i++];
    }
    out_bias = p[i];
  }
};

/// Subnetwork computing c * g(A x + b) with the frozen hat weights.
inline BumpSubnet bump_subnet(const Eigen::Matrix2d& a, const Eigen::Vector2d& b, double c) {
  BumpSubnet s;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t t = 0; t < 3; ++t) {
      const std::size_t j = 3 * i + t;
      s.w1[2 * j] = a(static_cast<Eigen::Index>(i), 0);
      s.w1[2 * j + 1] = a(static_cast<Eigen::Index>(i), 1);
      s.b1[j] = b(static_cast<Eigen::Index>(i)) - BumpModel::kShifts[t];
    }
  }
  s.c = c;
  return s;
}

/// Random affine maps and output weights, all uniform in [-1, 1].
inline BumpModel build_fixed_topology(std::size_t n_sub, std::uint64_t seed) {
  detail::require(n_sub >= 1, "topology: need at least one subnetwork");
  std::mt19937_64 rng(seed);
  auto u = [&] { return 2.0 * detail::unit_uniform(rng) - 1.0; };
  BumpModel m;
  for (std::size_t k = 0; k < n_sub; ++k) {
    Eigen::Matrix2d a;
    a << u(), u(), u(), u();
    const Eigen::Vector2d b(u(), u());
    m.subnets.push_back(bump_subnet(a, b, u()));
  }
  return m;
}

/// Edges of the fixed topology: 6 * 2 + 6 + 1 per subnetwork.
inline std::size_t fixed_topology_edges(std::size_t n_sub) { return n_sub * (6 * 2 + 6 + 1); }

struct Sample {
  std::array<double, 2> x{};
  double y = 0.0;
};

inline std::vector<Sample> grid_samples(const SampledFunction& target) {
  detail::require(target.grid.dims() == 2, "training: target must be two-dimensional");
  std::vector<Sample> out(target.grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    target.grid.point(i, out[i].x);
    out[i].y = target.values[i];
  }
  return out;
}

/// Mean of (model(x) - y)^2 over the batch and its gradient in parameters() order.
inline double loss_and_gradient(const BumpModel& m, std::span<const Sample> batch, std::vector<double>& grad) {
  grad.assign(m.parameter_count(), 0.0);
  if (batch.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  std::array<double, 6> pre{};
  std::vector<double> zpre(m.size());
  for (const Sample& s : batch) {
    // Forward pass, keeping pre-activations.
    double out = m.out_bias;
    for (std::size_t k = 0; k < m.size(); ++k) {
      const BumpSubnet& sn = m.subnets[k];
      double z = BumpModel::kLayer2Bias;
      for (std::size_t j = 0; j < 6; ++j) {
        const double v = sn.w1[2 * j] * s.x[0] + sn.w1[2 * j + 1] * s.x[1] + sn.b1[j];
        z += BumpModel::kLayer2[j % 3] * std::max(0.0, v);
      }
      zpre[k] = z;
      out += sn.c * std::max(0.0, z);
    }
    const double r = out - s.y;
    loss += r * r * scale;
    const double g = 2.0 * r * scale;
    for (std::size_t k = 0; k < m.size(); ++k) {
      const BumpSubnet& sn = m.subnets[k];
      const std::size_t base = k * BumpSubnet::kParams;
      const double z = std::max(0.0, zpre[k]);
      grad[base + 18] += g * z;
      if (!(zpre[k] > 0.0) || sn.c == 0.0) continue;
      for (std::size_t j = 0; j < 6; ++j) {
        pre[j] = sn.w1[2 * j] * s.x[0] + sn.w1[2 * j + 1] * s.x[1] + sn.b1[j];
        if (!(pre[j] > 0.0)) continue;
        const double d = g * sn.c * BumpModel::kLayer2[j % 3];
        grad[base + 2 * j] += d * s.x[0];
        grad[base + 2 * j + 1] += d * s.x[1];
        grad[base + 12 + j] += d;
      }
    }
    grad.back() += g;
  }
  return loss;
}

/// Smallest |pre-activation| over all ReLU nodes and samples (distance to the nearest kink).
inline double min_abs_preactivation(const BumpModel& m, std::span<const Sample> batch) {
  double best = INFINITY;
  for (const Sample& s : batch) {
    for (const auto& sn : m.subnets) {
      double z = BumpModel::kLayer2Bias;
      for (std::size_t j = 0; j < 6; ++j) {
        const double v = sn.w1[2 * j] * s.x[0] + sn.w1[2 * j + 1] * s.x[1] + sn.b1[j];
        best = std::min(best, std::abs(v));
        z += BumpModel::kLayer2[j % 3] * std::max(0.0, v);
      }
      best = std::min(best, std::abs(z));
    }
  }
  return best;
}

struct TrainConfig {
  std::size_t epochs = 50;
  double learning_rate = 0.01;
  std::size_t batch_size = 64;
  std::uint64_t seed = 1;
  std::size_t grid_n = 128;
  std::size_t decay_every = 100;
  double decay = 0.5;

  void validate() const {
    detail::require(learning_rate >= 0.0 && std::isfinite(learning_rate), "train: learning rate must be >= 0");
    detail::require(batch_size >= 1, "train: batch size must be >= 1");
    detail::require(grid_n >= 2, "train: grid_n must be >= 2");
    detail::require(decay_every >= 1 && decay > 0.0 && decay <= 1.0, "train: decay must lie in (0, 1]");
  }
};

struct LossTrace {
  std::vector<double> epoch_loss;
  double final_l2 = 0.0;
};

/// Sample grid on [-1, 1]^2.
inline Grid training_grid(std::size_t n) { return Grid::cube(2, -1.0, 1.0, n); }

inline SampledFunction sample_model(const BumpModel& m, const Grid& grid) {
  return sample(grid, [&](std::span<const double> x) { return m(x); });
}

/// Minibatch SGD on the grid samples; layer 2 never changes.
inline LossTrace sgd_train(BumpModel& m, const SampledFunction& target, const TrainConfig& cfg) {
  cfg.validate();
  const std::vector<Sample> samples = grid_samples(target);
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(cfg.seed ^ 0x5eed5eedULL);
  LossTrace trace;
  std::vector<double> grad;
  std::vector<Sample> batch;
  std::vector<double> params = m.parameters();
  double lr = cfg.learning_rate;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (epoch > 0 && epoch % cfg.decay_every == 0) lr *= cfg.decay;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(samples[order[i]]);
      const double loss = loss_and_gradient(m, batch, grad);
      if (!std::isfinite(loss)) {
        throw NumericalError("sgd", "non-finite loss at epoch " + std::to_string(epoch + 1) +
                                        " (learning rate " + format_double(lr) + " may be too large)",
                             loss);
      }
      total += loss * static_cast<double>(end - start);
      if (lr != 0.0) {
        for (std::size_t p = 0; p < params.size(); ++p) params[p] -= lr * grad[p];
        m.set_parameters(params);
      }
    }
    trace.epoch_loss.push_back(total / static_cast<double>(samples.size()));
  }
  trace.final_l2 = grid_norms(target, sample_model(m, target.grid)).l2;
  return trace;
}

/// Cell-corner features sqrt(w) z_k(x_i) and targets sqrt(w) y_i, so squared norms are grid L2 norms.
struct FeatureSystem {
  Eigen::MatrixXd features;
  Eigen::VectorXd target;
};

inline FeatureSystem subnetwork_features(const BumpModel& m, const SampledFunction& target) {
  const Grid& grid = target.grid;
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.is_cell_corner(i)) nodes.push_back(i);
  }
  const double w = std::sqrt(grid.cell_weight());
  FeatureSystem fs{Eigen::MatrixXd(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(m.size())),
                   Eigen::VectorXd(static_cast<Eigen::Index>(nodes.size()))};
  std::vector<double> x(2);
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    grid.point(nodes[r], x);
    fs.target(static_cast<Eigen::Index>(r)) = w * target.values[nodes[r]];
    for (std::size_t k = 0; k < m.size(); ++k) {
      fs.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = w * m.feature(k, x);
    }
  }
  return fs;
}

/// Keeps the m_sub largest |c_k| subnetworks weighted by c_k (ties to the lower index), no refit.
inline BumpModel select_top_subnetworks(const BumpModel& m, const Eigen::VectorXd& c, std::size_t m_sub) {
  detail::require(static_cast<std::size_t>(c.size()) == m.size(), "select: one coefficient per subnetwork");
  detail::require(m_sub <= m.size(), "select: M_sub exceeds the number of subnetworks");
  std::vector<std::size_t> idx(m.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(c(static_cast<Eigen::Index>(a))) > std::abs(c(static_cast<Eigen::Index>(b)));
  });
  idx.resize(m_sub);
  std::sort(idx.begin(), idx.end());
  BumpModel out;
  for (std::size_t k : idx) {
    BumpSubnet s = m.subnets[k];
    s.c = c(static_cast<Eigen::Index>(k));
    out.subnets.push_back(s);
  }
  return out;
}

/// Least-squares output weights for the subnetworks already in m, on the cell-corner samples.
inline BumpModel refit_output_weights(BumpModel m, const SampledFunction& target) {
  if (m.subnets.empty()) return m;
  const FeatureSystem fs = subnetwork_features(m, target);
  const Eigen::VectorXd c = fs.features.completeOrthogonalDecomposition().solve(fs.target);
  if (!c.allFinite()) throw NumericalError("refit", "least-squares output weights are not finite", 0.0);
  for (std::size_t k = 0; k < m.size(); ++k) m.subnets[k].c = c(static_cast<Eigen::Index>(k));
  return m;
}

/// Connectivity of the normalized network realizing the model (0 for an empty or all-zero model).
inline std::size_t model_edges(const BumpModel& m) {
  if (m.subnets.empty()) return 0;
  return normalize_network(m.to_network()).connectivity();
}

enum class TargetKind { line, cartoon };

struct ExperimentConfig {
  TargetKind target = TargetKind::line;
  std::vector<std::size_t> sizes{4, 8, 16};
  TrainConfig train;
  /// Lambda grid length for the cartoon path.
  std::size_t lambda_path = 40;
  /// Size of the large network trained for the cartoon sweep.
  std::size_t subnetworks = 512;
  /// Line target normal angle in degrees.
  double line_angle = 30.0;
  std::uint64_t cartoon_seed = 1;
  /// Re-solve the kept output weights by least squares after top-M selection.
  bool refit = false;

  void validate() const {
    train.validate();
    detail::require(!sizes.empty(), "experiment: sizes must not be empty");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      detail::require(sizes[i] >= 1, "experiment: sizes must be >= 1");
      if (i > 0) detail::require(sizes[i] > sizes[i - 1], "experiment: sizes must be strictly increasing");
    }
    detail::require(lambda_path >= 1, "experiment: lambda_path must be >= 1");
    if (target == TargetKind::cartoon) {
      detail::require(sizes.back() <= subnetworks, "experiment: largest M_sub exceeds the trained subnetworks");
    }
  }
};

/// The fixed-seed cartoon mapped from [0, 1]^2 onto the training domain [-1, 1]^2.
inline SampledFunction training_cartoon(std::uint64_t seed, const Grid& grid) {
  CartoonParams p;
  p.seed = seed;
  const CartoonFunction c = generate_cartoon(p);
  return sample(grid, [&](std::span<const double> x) { return c(0.5 * (x[0] + 1.0), 0.5 * (x[1] + 1.0)); });
}

inline SampledFunction experiment_target(const ExperimentConfig& cfg) {
  const Grid grid = training_grid(cfg.train.grid_n);
  if (cfg.target == TargetKind::line) {
    return line_singularity_target(cfg.line_angle * std::numbers::pi / 180.0, 0.0, grid);
  }
  return training_cartoon(cfg.cartoon_seed, grid);
}

struct ExperimentRow {
  std::size_t edges = 0;
  double l2_error = 0.0;
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  /// Final network of the largest run (line) or the full Lasso-weighted network (cartoon).
  Network network{1, {AffineLayer(1, 1)}, Activation::relu()};
  double lambda = 0.0;
  /// Largest Lasso optimality violation at the selected lambda (cartoon only).
  double kkt_violation = 0.0;
  std::size_t lasso_active = 0;
  std::vector<LossTrace> traces;

  std::string csv() const {
    CsvWriter w({"edges", "l2_error", "epochs", "seed"});
    for (const auto& r : rows) {
      w.row({std::to_string(r.edges), format_double(r.l2_error), std::to_string(r.epochs), std::to_string(r.seed)});
    }
    return w.str();
  }

  /**
   * Second-order coefficient of a least-squares quadratic in edges fitted to log(error).
   * Negative means faster than exponential decay. NaN with fewer than 3 distinct points.
   */
  double semilog_curvature() const {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
      if (r.l2_error > 0.0 && (pts.empty() || static_cast<double>(r.edges) != pts.back().first)) {
        pts.emplace_back(static_cast<double>(r.edges), std::log(r.l2_error));
      }
    }
    if (pts.size() < 3) return std::numeric_limits<double>::quiet_NaN();
    const double scale = pts.back().first;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), 3);
    Eigen::VectorXd b(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double x = pts[static_cast<std::size_t>(i)].first / scale;
      a.row(i) << 1.0, x, x * x;
      b(i) = pts[static_cast<std::size_t>(i)].second;
    }
    return a.colPivHouseholderQr().solve(b)(2) / (scale * scale);
  }
};

/**
 * line: one network per size (size = subnetwork count). cartoon: one large network, Lasso on the
 * output weights, then the top-M_sub subnetworks for each size. Rows are sorted by edges.
 */
inline ExperimentResult error_vs_edges_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const SampledFunction target = experiment_target(cfg);
  ExperimentResult out;
  if (cfg.target == TargetKind::line) {
    for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
      const std::uint64_t seed = cfg.train.seed + i;
      BumpModel m = build_fixed_topology(cfg.sizes[i], seed);
      TrainConfig tc = cfg.train;
      tc.seed = seed;
      LossTrace trace = sgd_train(m, target, tc);
      out.rows.push_back({model_edges(m), trace.final_l2, cfg.train.epochs, seed});
      out.traces.push_back(std::move(trace));
      if (i + 1 == cfg.sizes.size()) out.network = normalize_network(m.to_network());
    }
  } else {
    BumpModel m = build_fixed_topology(cfg.subnetworks, cfg.train.seed);
    out.traces.push_back(sgd_train(m, target, cfg.train));
    const FeatureSystem fs = subnetwork_features(m, target);
    const LassoPathPoint pick = lasso_path_select(fs.features, fs.target, cfg.sizes.back(), cfg.lambda_path);
    out.lambda = pick.lambda;
    out.kkt_violation = lasso_kkt_violation(fs.features, fs.target, pick.result.coefficients, pick.lambda);
    out.lasso_active = pick.result.active();
    for (std::size_t size : cfg.sizes) {
      BumpModel top = select_top_subnetworks(m, pick.result.coefficients, size);
      if (cfg.refit) top = refit_output_weights(std::move(top), target);
      const double err = grid_norms(target, sample_model(top, target.grid)).l2;
      out.rows.push_back({model_edges(top), err, cfg.train.epochs, cfg.train.seed});
    }
    out.network = normalize_network(select_top_subnetworks(m, pick.result.coefficients, m.size()).to_network());
  }
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const ExperimentRow& a, const ExperimentRow& b) { return a.edges < b.edges; });
  return out;
}

inline std::string experiment_config_to_text(const ExperimentConfig& cfg) {
  std::string s = "target " + std::string(cfg.target == TargetKind::line ? "line" : "cartoon") + "\nsizes ";
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) s += (i ? "," : "") + std::to_string(cfg.sizes[i]);
  s += "\nepochs " + std::to_string(cfg.train.epochs);
  s += "\nlr " + format_double(cfg.train.learning_rate);
  s += "\nbatch " + std::to_string(cfg.train.batch_size);
  s += "\nseed " + std::to_string(cfg.train.seed);
  s += "\ngrid_n " + std::to_string(cfg.train.grid_n);
  s += "\nlambda_path " + std::to_string(cfg.lambda_path);
  s += "\nsubnetworks " + std::to_string(cfg.subnetworks);
  s += "\nline_angle " + format_double(cfg.line_angle);
  s += "\ncartoon_seed " + std::to_string(cfg.cartoon_seed);
  s += "\nrefit " + std::string(cfg.refit ? "1" : "0") + "\n";
  return s;
}

/// Line-oriented "key value" config; unknown keys and malformed values are errors.
inline ExperimentConfig experiment_config_from_text(std::string_view text) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto count = [&](std::string_view v, std::string_view key) {
    auto n = parse_int(v);
    if (!n || *n < 0) {
      throw ParseError("experiment config: bad value for '" + std::string(key) + "' on line " + std::to_string(line_no),
                       line_no);
    }
    return static_cast<std::size_t>(*n);
  };
  auto real = [&](std::string_view v, std::string_view key) {
    auto d = parse_double(v);
    if (!d || !std::isfinite(*d)) {
      throw ParseError("experiment config: bad value for '" + std::string(key) + "' on line " + std::to_string(line_no),
                       line_no);
    }
    return *d;
  };
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 2) {
      throw ParseError("experiment config: expected 'key value' on line " + std::to_string(line_no), line_no);
    }
    const std::string_view key = toks[0], v = toks[1];
    if (key == "target") {
      if (v == "line") {
        cfg.target = TargetKind::line;
      } else if (v == "cartoon") {
        cfg.target = TargetKind::cartoon;
      } else {
        throw ParseError("experiment config: target must be line or cartoon (line " + std::to_string(line_no) + ")",
                         line_no);
      }
    } else if (key == "sizes") {
      cfg.sizes.clear();
      try {
        for (double d : parse_double_list(v)) {
          if (!(d >= 1.0) || d != std::floor(d)) throw ValidationError("bad size");
          cfg.sizes.push_back(static_cast<std::size_t>(d));
        }
      } catch (const ValidationError&) {
        throw ParseError("experiment config: bad sizes list on line " + std::to_string(line_no), line_no);
      }
    } else if (key == "epochs") {
      cfg.train.epochs = count(v, key);
    } else if (key == "lr") {
      cfg.train.learning_rate = real(v, key);
    } else if (key == "batch") {
      cfg.train.batch_size = count(v, key);
    } else if (key == "seed") {
      cfg.train.seed = count(v, key);
    } else if (key == "grid_n") {
      cfg.train.grid_n = count(v, key);
    } else if (key == "lambda_path") {
      cfg.lambda_path = count(v, key);
    } else if (key == "subnetworks") {
      cfg.subnetworks = count(v, key);
    } else if (key == "line_angle") {
      cfg.line_angle = real(v, key);
    } else if (key == "cartoon_seed") {
      cfg.cartoon_seed = count(v, key);
    } else if (key == "refit") {
      if (v != "0" && v != "1") {
        throw ParseError("experiment config: refit must be 0 or 1 (line " + std::to_string(line_no) + ")", line_no);
      }
      cfg.refit = v == "1";
    } else {
      throw ParseError("experiment config: unknown key '" + std::string(key) + "' on line " + std::to_string(line_no),
                       line_no);
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace sparsenet

#endif  // SPARSENET_TRAINING_HPP
