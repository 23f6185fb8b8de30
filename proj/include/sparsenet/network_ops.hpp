#ifndef SPARSENET_NETWORK_OPS_HPP
#define SPARSENET_NETWORK_OPS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sparsenet/activation.hpp"
#include "sparsenet/error.hpp"
#include "sparsenet/grid.hpp"
#include "sparsenet/network.hpp"

namespace sparsenet {

/// Single-layer network x -> 0 (or a constant vector) with no edges.
inline Network constant_network(std::size_t input_dim, std::vector<double> value, Activation act) {
  const std::size_t rows = value.size();
  return Network(input_dim, {AffineLayer(rows, input_dim, {}, std::move(value))}, act);
}

/// Two-layer ReLU network computing x = rho(x) - rho(-x) componentwise (4 edges per coordinate).
inline Network relu_identity_network(std::size_t d) {
  detail::require(d >= 1, "relu_identity_network: d must be >= 1");
  std::vector<Entry> first;
  std::vector<Entry> second;
  for (std::size_t i = 0; i < d; ++i) {
    first.push_back({2 * i, i, 1.0});
    first.push_back({2 * i + 1, i, -1.0});
    second.push_back({i, 2 * i, 1.0});
    second.push_back({i, 2 * i + 1, -1.0});
  }
  return Network(d,
                 {AffineLayer(2 * d, d, std::move(first), std::vector<double>(2 * d, 0.0)),
                  AffineLayer(d, 2 * d, std::move(second), std::vector<double>(d, 0.0))},
                 Activation::relu());
}

namespace detail {

inline AffineLayer drop_rows_and_cols(const AffineLayer& layer, const std::vector<bool>& keep_row,
                                      const std::vector<bool>& keep_col) {
  std::vector<std::size_t> row_map(layer.rows());
  std::vector<std::size_t> col_map(layer.cols());
  std::size_t rows = 0;
  std::size_t cols = 0;
  for (std::size_t r = 0; r < layer.rows(); ++r) row_map[r] = keep_row[r] ? rows++ : 0;
  for (std::size_t c = 0; c < layer.cols(); ++c) col_map[c] = keep_col[c] ? cols++ : 0;
  std::vector<Entry> entries;
  for (const auto& e : layer.entries()) {
    if (keep_row[e.row] && keep_col[e.col]) entries.push_back({row_map[e.row], col_map[e.col], e.weight});
  }
  std::vector<double> bias;
  for (std::size_t r = 0; r < layer.rows(); ++r) {
    if (keep_row[r]) bias.push_back(layer.bias()[r]);
  }
  return AffineLayer(rows, cols, std::move(entries), std::move(bias));
}

inline void check_square(const Eigen::MatrixXd& a, std::size_t d, const char* op) {
  if (static_cast<std::size_t>(a.rows()) != d || static_cast<std::size_t>(a.cols()) != d) {
    throw ValidationError(std::string(op) + ": matrix must be " + std::to_string(d) + "x" + std::to_string(d));
  }
}

}  // namespace detail

/**
 * Removes hidden nodes without outgoing edges and collapses networks containing an
 * all-zero weight matrix into the equivalent constant single-layer network.
 * Input nodes and output nodes are always kept.
 */
inline Network normalize_network(const Network& net) {
  std::vector<AffineLayer> layers = net.layers();
  for (;;) {
    if (layers.size() > 1) {
      const bool has_zero_layer =
          std::any_of(layers.begin(), layers.end(), [](const AffineLayer& l) { return l.nnz() == 0; });
      if (has_zero_layer) {
        const Network current(net.input_dim(), layers, net.activation());
        const std::vector<double> origin(net.input_dim(), 0.0);
        return constant_network(net.input_dim(), current.eval(origin), net.activation());
      }
    }
    bool removed = false;
    for (std::size_t l = layers.size() - 1; l-- > 0;) {
      const AffineLayer& next = layers[l + 1];
      std::vector<bool> used(layers[l].rows(), false);
      for (const auto& e : next.entries()) used[e.col] = true;
      if (std::all_of(used.begin(), used.end(), [](bool u) { return u; })) continue;
      removed = true;
      const std::vector<bool> all_rows(next.rows(), true);
      const std::vector<bool> all_cols(layers[l].cols(), true);
      layers[l + 1] = detail::drop_rows_and_cols(next, all_rows, used);
      layers[l] = detail::drop_rows_and_cols(layers[l], used, all_cols);
      break;
    }
    if (!removed) break;
  }
  return Network(net.input_dim(), std::move(layers), net.activation());
}

/// Normalizes and verifies that the result agrees with the input on check_grid to 1e-12.
inline Network normalize_network(const Network& net, const Grid& check_grid) {
  Network out = normalize_network(net);
  if (net.output_dim() == 1 && check_grid.dims() == net.input_dim()) {
    const auto before = sample_network(net, check_grid);
    const auto after = sample_network(out, check_grid);
    const double gap = grid_norms(before, after).sup;
    if (gap > 1e-12) throw NumericalError("normalize_network", "normalized network differs on check grid", gap);
  }
  return out;
}

/// Psi(x) = |det A|^{1/2} net(A x - b).
inline Network affine_transform_network(const Network& net, const Eigen::MatrixXd& a, std::span<const double> b) {
  const std::size_t d = net.input_dim();
  detail::check_square(a, d, "affine_transform_network");
  detail::require(b.size() == d, "affine_transform_network: shift has wrong dimension");
  const double det = std::abs(a.determinant());
  if (!(det >= 1e-12)) throw ValidationError("affine_transform_network: matrix is singular (|det| < 1e-12)");
  const double scale = std::sqrt(det);

  std::vector<AffineLayer> layers = net.layers();
  const AffineLayer& first = net.layers().front();
  std::vector<double> bias(first.bias().begin(), first.bias().end());
  std::map<std::pair<std::size_t, std::size_t>, double> composed;
  for (const auto& e : first.entries()) {
    bias[e.row] -= e.weight * b[e.col];
    for (std::size_t c = 0; c < d; ++c) {
      const double w = a(static_cast<Eigen::Index>(e.col), static_cast<Eigen::Index>(c));
      if (w != 0.0) composed[{e.row, c}] += e.weight * w;
    }
  }
  std::vector<Entry> entries;
  for (const auto& [key, w] : composed) entries.push_back({key.first, key.second, w});
  layers.front() = AffineLayer(first.rows(), d, std::move(entries), std::move(bias));

  if (scale != 1.0) {
    AffineLayer& last = layers.back();
    std::vector<Entry> scaled(last.entries().begin(), last.entries().end());
    for (auto& e : scaled) e.weight *= scale;
    std::vector<double> sb(last.bias().begin(), last.bias().end());
    for (double& v : sb) v *= scale;
    last = AffineLayer(last.rows(), last.cols(), std::move(scaled), std::move(sb));
  }
  return Network(d, std::move(layers), net.activation());
}

/// x -> net(x - shift).
inline Network translate_network(const Network& net, std::span<const double> shift) {
  detail::require(shift.size() == net.input_dim(), "translate_network: shift has wrong dimension");
  std::vector<AffineLayer> layers = net.layers();
  const AffineLayer& first = net.layers().front();
  std::vector<double> bias(first.bias().begin(), first.bias().end());
  for (const auto& e : first.entries()) bias[e.row] -= e.weight * shift[e.col];
  layers.front() = AffineLayer(first.rows(), first.cols(), {first.entries().begin(), first.entries().end()},
                               std::move(bias));
  return Network(net.input_dim(), std::move(layers), net.activation());
}

/**
 * Single network computing sum_i c_i net_i(x) at the common depth L.
 * Hidden layers are stacked block-diagonally; the coefficients are folded into the
 * output layer, so no extra edges are spent on them. Members with c_i = 0 are dropped.
 */
inline Network parallel_sum(const std::vector<Network>& nets, std::span<const double> coeffs) {
  detail::require(!nets.empty(), "parallel_sum: need at least one network");
  detail::require(nets.size() == coeffs.size(), "parallel_sum: " + std::to_string(nets.size()) + " networks but " +
                                                    std::to_string(coeffs.size()) + " coefficients");
  const Network& ref = nets.front();
  for (std::size_t i = 0; i < nets.size(); ++i) {
    const Network& n = nets[i];
    const std::string where = "parallel_sum: network " + std::to_string(i);
    if (n.input_dim() != ref.input_dim()) throw ValidationError(where + " has a different input dimension");
    if (!(n.activation() == ref.activation())) throw ValidationError(where + " has a different activation");
    if (n.depth() != ref.depth()) throw ValidationError(where + " has a different depth");
    if (n.output_dim() != 1) throw ValidationError(where + " does not have a scalar output");
    if (!std::isfinite(coeffs[i])) throw ValidationError(where + " has a non-finite coefficient");
  }
  const std::size_t d = ref.input_dim();
  const std::size_t depth = ref.depth();

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < nets.size(); ++i) {
    if (coeffs[i] != 0.0) active.push_back(i);
  }
  if (active.empty()) {
    std::vector<AffineLayer> layers;
    std::size_t cols = d;
    for (std::size_t l = 0; l + 1 < depth; ++l) {
      layers.emplace_back(1, cols);
      cols = 1;
    }
    layers.emplace_back(1, cols);
    return Network(d, std::move(layers), ref.activation());
  }

  std::vector<AffineLayer> layers;
  std::vector<std::size_t> col_offset(active.size(), 0);
  std::size_t cols = d;
  for (std::size_t l = 0; l + 1 < depth; ++l) {
    std::vector<Entry> entries;
    std::vector<double> bias;
    std::vector<std::size_t> row_offset(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      const AffineLayer& layer = nets[active[k]].layer(l);
      row_offset[k] = bias.size();
      for (const auto& e : layer.entries()) {
        entries.push_back({row_offset[k] + e.row, (l == 0 ? 0 : col_offset[k]) + e.col, e.weight});
      }
      bias.insert(bias.end(), layer.bias().begin(), layer.bias().end());
    }
    const std::size_t rows = bias.size();
    layers.emplace_back(rows, cols, std::move(entries), std::move(bias));
    col_offset = row_offset;
    cols = rows;
  }

  std::map<std::size_t, double> out;
  double out_bias = 0.0;
  for (std::size_t k = 0; k < active.size(); ++k) {
    const double c = coeffs[active[k]];
    const AffineLayer& layer = nets[active[k]].layers().back();
    for (const auto& e : layer.entries()) out[(depth == 1 ? 0 : col_offset[k]) + e.col] += c * e.weight;
    out_bias += c * layer.bias()[0];
  }
  std::vector<Entry> entries;
  for (const auto& [col, w] : out) entries.push_back({0, col, w});
  layers.emplace_back(1, cols, std::move(entries), std::vector<double>{out_bias});
  return Network(d, std::move(layers), ref.activation());
}

inline Network parallel_sum(const std::vector<Network>& nets, const std::vector<double>& coeffs) {
  return parallel_sum(nets, std::span<const double>(coeffs));
}

/// sum_i c_i net(x - d_i) as parallel shifted copies merged at the output.
inline Network sum_of_translates(const Network& net, std::span<const double> coeffs,
                                 const std::vector<std::vector<double>>& shifts) {
  detail::require(!coeffs.empty(), "sum_of_translates: need at least one term");
  detail::require(coeffs.size() == shifts.size(), "sum_of_translates: " + std::to_string(coeffs.size()) +
                                                      " coefficients but " + std::to_string(shifts.size()) +
                                                      " shifts");
  detail::require(net.output_dim() == 1, "sum_of_translates: network output is not scalar");
  std::vector<Network> copies;
  copies.reserve(shifts.size());
  for (const auto& s : shifts) copies.push_back(translate_network(net, s));
  return parallel_sum(copies, coeffs);
}

/**
 * Extends a network to the given depth by passing the output through ReLU identity pairs
 * y = rho(y) - rho(-y). Requires an activation with an exact identity pair.
 */
inline Network pad_to_depth(const Network& net, std::size_t depth) {
  detail::require(depth >= net.depth(), "pad_to_depth: target depth is smaller than network depth");
  if (depth == net.depth()) return net;
  if (!net.activation().has_exact_identity_pair()) {
    throw ValidationError("pad_to_depth: activation '" + net.activation().name() + "' has no exact identity pair");
  }
  std::vector<AffineLayer> layers = net.layers();
  const AffineLayer last = layers.back();
  const std::size_t out = last.rows();

  std::vector<Entry> split;
  std::vector<double> split_bias(2 * out);
  for (const auto& e : last.entries()) {
    split.push_back({e.row, e.col, e.weight});
    split.push_back({out + e.row, e.col, -e.weight});
  }
  for (std::size_t r = 0; r < out; ++r) {
    split_bias[r] = last.bias()[r];
    split_bias[out + r] = -last.bias()[r];
  }
  layers.back() = AffineLayer(2 * out, last.cols(), std::move(split), std::move(split_bias));

  for (std::size_t l = net.depth() + 1; l < depth; ++l) {
    std::vector<Entry> pass;
    for (std::size_t r = 0; r < out; ++r) {
      pass.push_back({r, r, 1.0});
      pass.push_back({r, out + r, -1.0});
      pass.push_back({out + r, r, -1.0});
      pass.push_back({out + r, out + r, 1.0});
    }
    layers.emplace_back(2 * out, 2 * out, std::move(pass), std::vector<double>(2 * out, 0.0));
  }
  std::vector<Entry> merge;
  for (std::size_t r = 0; r < out; ++r) {
    merge.push_back({r, r, 1.0});
    merge.push_back({r, out + r, -1.0});
  }
  layers.emplace_back(out, 2 * out, std::move(merge), std::vector<double>(out, 0.0));
  return Network(net.input_dim(), std::move(layers), net.activation());
}

/// Shifts (ascending) and merged coefficients of t(x) = rho(x) - rho(x-p1) - rho(x-p2) + rho(x-p3).
inline std::vector<std::pair<double, double>> hat_terms(double p1, double p2, double p3) {
  std::vector<std::pair<double, double>> terms;
  for (auto [shift, c] : {std::pair{0.0, 1.0}, std::pair{p1, -1.0}, std::pair{p2, -1.0}, std::pair{p3, 1.0}}) {
    auto it = std::find_if(terms.begin(), terms.end(), [&](const auto& t) { return t.first == shift; });
    if (it == terms.end()) {
      terms.emplace_back(shift, c);
    } else {
      it->second += c;
    }
  }
  std::erase_if(terms, [](const auto& t) { return t.second == 0.0; });
  return terms;
}

/// Support of t: [0, p3] for ReLU, [0, p3 + K] for the smooth splice. Sigmoidal t has no compact support.
inline double hat_support_end(const Activation& act, double p3) {
  return act.kind() == ActivationKind::smooth_relu ? p3 + act.knee() : p3;
}

/// q = sup |t| by a 10001-point grid search over the support of t.
inline double hat_peak(const Activation& act, double p1, double p2, double p3) {
  const auto terms = hat_terms(p1, p2, p3);
  const double hi = hat_support_end(act, p3);
  constexpr std::size_t n = 10001;
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = hi * static_cast<double>(i) / static_cast<double>(n - 1);
    double t = 0.0;
    for (const auto& [s, c] : terms) t += c * act(x - s);
    q = std::max(q, std::abs(t));
  }
  return q;
}

/**
 * Three-layer bump g(x) = rho(sum_i t(x_i) - (d-1) q), with q = sup|t|.
 * Layer 1 holds one node per coordinate and distinct shift of t.
 */
inline Network bump_network(const Activation& act, std::size_t d, double p1, double p2, double p3) {
  detail::require(d >= 1, "bump_network: d must be >= 1");
  detail::require(p1 > 0.0 && p1 <= p2 && p2 <= p3, "bump_network: need 0 < p1 <= p2 <= p3");
  if (std::abs(p1 + p2 - p3) > 1e-12) throw ValidationError("bump_network: p1 + p2 must equal p3");
  const auto terms = hat_terms(p1, p2, p3);
  const double q = hat_peak(act, p1, p2, p3);

  const std::size_t per = terms.size();
  std::vector<Entry> first;
  std::vector<double> first_bias;
  std::vector<Entry> second;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < per; ++k) {
      const std::size_t node = i * per + k;
      first.push_back({node, i, 1.0});
      first_bias.push_back(-terms[k].first);
      second.push_back({0, node, terms[k].second});
    }
  }
  std::vector<AffineLayer> layers;
  layers.emplace_back(d * per, d, std::move(first), std::move(first_bias));
  layers.emplace_back(1, d * per, std::move(second), std::vector<double>{-static_cast<double>(d - 1) * q});
  layers.emplace_back(1, 1, std::vector<Entry>{{0, 0, 1.0}}, std::vector<double>{0.0});
  return Network(d, std::move(layers), act);
}

/// Multiplies the output of a network by c (c != 0).
inline Network scale_network(const Network& net, double c) {
  detail::require(c != 0.0 && std::isfinite(c), "scale_network: factor must be finite and nonzero");
  std::vector<AffineLayer> layers = net.layers();
  AffineLayer& last = layers.back();
  std::vector<Entry> scaled(last.entries().begin(), last.entries().end());
  for (auto& e : scaled) e.weight *= c;
  std::vector<double> bias(last.bias().begin(), last.bias().end());
  for (double& v : bias) v *= c;
  last = AffineLayer(last.rows(), last.cols(), std::move(scaled), std::move(bias));
  return Network(net.input_dim(), std::move(layers), net.activation());
}

}  // namespace sparsenet

#endif  // SPARSENET_NETWORK_OPS_HPP
