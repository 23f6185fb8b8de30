#ifndef SPARSENET_NETWORK_HPP
#define SPARSENET_NETWORK_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sparsenet/activation.hpp"
#include "sparsenet/error.hpp"
#include "sparsenet/grid.hpp"

namespace sparsenet {

struct Entry {
  std::size_t row = 0;
  std::size_t col = 0;
  double weight = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

/**
 * Sparse affine map x -> A x + b with A stored as (row, col, weight) triples sorted by (row, col).
 * Zero weights are never stored: constructing or setting an entry to 0 removes it.
 */
class AffineLayer {
 public:
  AffineLayer(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bias_(rows, 0.0) {}

  AffineLayer(std::size_t rows, std::size_t cols, std::vector<Entry> entries, std::vector<double> bias)
      : rows_(rows), cols_(cols), entries_(std::move(entries)), bias_(std::move(bias)) {
    if (bias_.size() != rows_) {
      throw ValidationError("affine layer: bias has " + std::to_string(bias_.size()) + " values, expected " +
                            std::to_string(rows_));
    }
    std::erase_if(entries_, [](const Entry& e) { return e.weight == 0.0; });
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (e.row >= rows_ || e.col >= cols_) {
        throw ValidationError("affine layer: entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                              ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_));
      }
      if (!std::isfinite(e.weight)) throw ValidationError("affine layer: non-finite weight");
      if (i > 0 && entries_[i - 1].row == e.row && entries_[i - 1].col == e.col) {
        throw ValidationError("affine layer: duplicate entry (" + std::to_string(e.row) + ", " +
                              std::to_string(e.col) + ")");
      }
    }
    for (double b : bias_) {
      if (!std::isfinite(b)) throw ValidationError("affine layer: non-finite bias");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  std::span<const Entry> entries() const noexcept { return entries_; }
  std::span<const double> bias() const noexcept { return bias_; }

  double weight(std::size_t row, std::size_t col) const {
    auto it = find(row, col);
    return (it != entries_.end() && it->row == row && it->col == col) ? it->weight : 0.0;
  }

  void set(std::size_t row, std::size_t col, double w) {
    if (row >= rows_ || col >= cols_) throw ValidationError("affine layer: set() index out of range");
    auto it = find(row, col);
    const bool present = it != entries_.end() && it->row == row && it->col == col;
    if (w == 0.0) {
      if (present) entries_.erase(it);
    } else if (present) {
      it->weight = w;
    } else {
      entries_.insert(it, Entry{row, col, w});
    }
  }

  void set_bias(std::size_t row, double b) { bias_.at(row) = b; }

  /// y = A x + b.
  void apply(std::span<const double> x, std::span<double> y) const noexcept {
    std::copy(bias_.begin(), bias_.end(), y.begin());
    for (const auto& e : entries_) y[e.row] += e.weight * x[e.col];
  }

  friend bool operator==(const AffineLayer&, const AffineLayer&) = default;

 private:
  std::vector<Entry>::iterator find(std::size_t row, std::size_t col) {
    return std::lower_bound(entries_.begin(), entries_.end(), std::pair{row, col},
                            [](const Entry& e, const std::pair<std::size_t, std::size_t>& key) {
                              return e.row != key.first ? e.row < key.first : e.col < key.second;
                            });
  }
  std::vector<Entry>::const_iterator find(std::size_t row, std::size_t col) const {
    return std::lower_bound(entries_.begin(), entries_.end(), std::pair{row, col},
                            [](const Entry& e, const std::pair<std::size_t, std::size_t>& key) {
                              return e.row != key.first ? e.row < key.first : e.col < key.second;
                            });
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<Entry> entries_;
  std::vector<double> bias_;
};

/**
 * Strictly layered feed-forward network
 *   Phi(x) = W_L rho(W_{L-1} rho(... rho(W_1 x))).
 * The activation follows every affine map except the last.
 */
class Network {
 public:
  Network(std::size_t input_dim, std::vector<AffineLayer> layers, Activation activation)
      : input_dim_(input_dim), layers_(std::move(layers)), activation_(activation) {
    detail::require(input_dim_ >= 1, "network: input dimension must be >= 1");
    detail::require(!layers_.empty(), "network: need at least one layer");
    std::size_t width = input_dim_;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      if (layers_[l].cols() != width) {
        throw ValidationError("network: layer " + std::to_string(l + 1) + " has " +
                              std::to_string(layers_[l].cols()) + " columns, previous width is " +
                              std::to_string(width));
      }
      detail::require(layers_[l].rows() >= 1, "network: layer " + std::to_string(l + 1) + " has no nodes");
      width = layers_[l].rows();
    }
  }

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t output_dim() const noexcept { return layers_.back().rows(); }
  const Activation& activation() const noexcept { return activation_; }
  const std::vector<AffineLayer>& layers() const noexcept { return layers_; }
  const AffineLayer& layer(std::size_t l) const { return layers_.at(l); }

  /// M(Phi): number of nonzero edge weights.
  std::size_t connectivity() const noexcept {
    std::size_t m = 0;
    for (const auto& layer : layers_) m += layer.nnz();
    return m;
  }

  /// N(Phi) = d + sum of layer widths.
  std::size_t node_count() const noexcept {
    std::size_t n = input_dim_;
    for (const auto& layer : layers_) n += layer.rows();
    return n;
  }

  std::size_t max_width() const noexcept {
    std::size_t w = input_dim_;
    for (const auto& layer : layers_) w = std::max(w, layer.rows());
    return w;
  }

  std::vector<double> eval(std::span<const double> x) const;
  double eval_scalar(std::span<const double> x) const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::size_t input_dim_;
  std::vector<AffineLayer> layers_;
  Activation activation_;
};

/// Reusable evaluation buffers; one per thread.
class Evaluator {
 public:
  explicit Evaluator(const Network& net) : net_(&net), a_(net.max_width()), b_(net.max_width()) {}

  /// Writes the full output vector into out (size output_dim()).
  void operator()(std::span<const double> x, std::span<double> out) {
    const auto& layers = net_->layers();
    std::span<const double> in = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& layer = layers[l];
      const bool last = l + 1 == layers.size();
      std::span<double> y = last ? out : std::span<double>(l % 2 == 0 ? a_ : b_).first(layer.rows());
      layer.apply(in, y);
      if (!last) {
        const auto& act = net_->activation();
        for (double& v : y) v = act(v);
      }
      in = y;
    }
  }

  double scalar(std::span<const double> x) {
    double out = 0.0;
    (*this)(x, std::span<double>(&out, 1));
    return out;
  }

 private:
  const Network* net_;
  std::vector<double> a_;
  std::vector<double> b_;
};

inline std::vector<double> Network::eval(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw ValidationError("eval_network: input has dimension " + std::to_string(x.size()) + ", network expects " +
                          std::to_string(input_dim_));
  }
  std::vector<double> out(output_dim());
  Evaluator ev(*this);
  ev(x, out);
  return out;
}

inline double Network::eval_scalar(std::span<const double> x) const {
  detail::require(output_dim() == 1, "eval_network: network output is not scalar");
  return eval(x)[0];
}

/// Samples a scalar-output network on every grid node.
inline SampledFunction sample_network(const Network& net, const Grid& grid) {
  detail::require(net.input_dim() == grid.dims(), "sample_network: grid dimension does not match network input");
  detail::require(net.output_dim() == 1, "sample_network: network output is not scalar");
  Evaluator ev(net);
  return sample(grid, [&](std::span<const double> x) { return ev.scalar(x); });
}

}  // namespace sparsenet

#endif  // SPARSENET_NETWORK_HPP
