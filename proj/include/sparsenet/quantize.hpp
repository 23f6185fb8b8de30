#ifndef SPARSENET_QUANTIZE_HPP
#define SPARSENET_QUANTIZE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sparsenet/error.hpp"
#include "sparsenet/format.hpp"
#include "sparsenet/grid.hpp"
#include "sparsenet/network.hpp"

namespace sparsenet {

/// Dyadic weight grid 2^-F Z intersected with the W-bit two's-complement range [-2^R, 2^R - 2^-F].
struct QuantizationSpec {
  int fractional_bits = 1;
  int range_bits = 0;

  int width() const noexcept { return fractional_bits + range_bits + 1; }
  double step() const noexcept { return std::ldexp(1.0, -fractional_bits); }
  double min_value() const noexcept { return -std::ldexp(1.0, range_bits); }
  double max_value() const noexcept { return std::ldexp(1.0, range_bits) - step(); }

  void validate() const {
    detail::require(fractional_bits >= 1, "quantization: F must be >= 1");
    detail::require(range_bits >= 0, "quantization: R must be >= 0");
    detail::require(width() <= 63, "quantization: F + R + 1 must be <= 63");
  }

  /// Integer code w * 2^F if w lies on the grid, otherwise nothing.
  bool to_code(double w, std::int64_t& code) const {
    const double scaled = std::ldexp(w, fractional_bits);
    if (!(scaled == std::nearbyint(scaled))) return false;
    if (w < min_value() || w > max_value()) return false;
    code = static_cast<std::int64_t>(scaled);
    return true;
  }

  double from_code(std::int64_t code) const { return std::ldexp(static_cast<double>(code), -fractional_bits); }

  /// Nearest grid value, ties toward zero, clamped to the representable range.
  double round(double w) const {
    const double scaled = std::ldexp(w, fractional_bits);
    const double mag = std::ceil(std::abs(scaled) - 0.5);
    const double q = std::ldexp(std::copysign(mag, scaled), -fractional_bits);
    return std::clamp(q, min_value(), max_value()) + 0.0;
  }

  friend bool operator==(const QuantizationSpec&, const QuantizationSpec&) = default;
};

/// Smallest R such that every weight and bias lies in [-2^R, 2^R].
inline int range_bits_for(const Network& net) {
  double m = 0.0;
  for (const auto& layer : net.layers()) {
    for (const auto& e : layer.entries()) m = std::max(m, std::abs(e.weight));
    for (double b : layer.bias()) m = std::max(m, std::abs(b));
  }
  int r = 0;
  while (std::ldexp(1.0, r) < m) ++r;
  return r;
}

/// Rounds every edge weight and bias onto the quantization grid. Weights that round to 0 disappear.
inline Network quantize_weights(const Network& net, const QuantizationSpec& spec) {
  spec.validate();
  std::vector<AffineLayer> layers;
  layers.reserve(net.depth());
  for (const auto& layer : net.layers()) {
    std::vector<Entry> entries;
    entries.reserve(layer.nnz());
    for (const auto& e : layer.entries()) entries.push_back({e.row, e.col, spec.round(e.weight)});
    std::vector<double> bias;
    for (double b : layer.bias()) bias.push_back(spec.round(b));
    layers.emplace_back(layer.rows(), layer.cols(), std::move(entries), std::move(bias));
  }
  return Network(net.input_dim(), std::move(layers), net.activation());
}

/// Sup distance between two scalar networks on a grid; stops early once it exceeds `stop_above`.
inline double sup_distance(const Network& a, const Network& b, const Grid& grid,
                           double stop_above = std::numeric_limits<double>::infinity()) {
  detail::require(a.input_dim() == grid.dims() && b.input_dim() == grid.dims(),
                  "sup_distance: grid dimension does not match networks");
  Evaluator ea(a);
  Evaluator eb(b);
  std::vector<double> x(grid.dims());
  double sup = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    sup = std::max(sup, std::abs(ea.scalar(x) - eb.scalar(x)));
    if (sup > stop_above) break;
  }
  return sup;
}

struct QuantizeResult {
  Network net;
  QuantizationSpec spec;
  double sup_error = 0.0;
};

/**
 * Finds the smallest F in 1..max_F whose rounded network is within eta of the input
 * (sup norm on test_grid). Fails with NumericalError if no F qualifies.
 */
inline QuantizeResult quantize_network(const Network& net, double eta, const Grid& test_grid, int max_F, int R) {
  detail::require(eta > 0.0 && eta < 0.5, "quantize_network: eta must lie in (0, 1/2)");
  detail::require(max_F >= 1, "quantize_network: max_F must be >= 1");
  detail::require(net.output_dim() == 1, "quantize_network: network output is not scalar");
  const double bound = std::ldexp(1.0, R);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const auto& layer = net.layer(l);
    for (const auto& e : layer.entries()) {
      if (std::abs(e.weight) > bound) {
        throw ValidationError("quantize_network: weight " + format_double(e.weight) + " in layer " +
                              std::to_string(l + 1) + " exceeds 2^" + std::to_string(R));
      }
    }
    for (double b : layer.bias()) {
      if (std::abs(b) > bound) {
        throw ValidationError("quantize_network: bias " + format_double(b) + " in layer " + std::to_string(l + 1) +
                              " exceeds 2^" + std::to_string(R));
      }
    }
  }
  for (int f = 1; f <= max_F; ++f) {
    const QuantizationSpec spec{f, R};
    spec.validate();
    Network q = quantize_weights(net, spec);
    const double err = sup_distance(net, q, test_grid, eta);
    if (err <= eta) return {std::move(q), spec, err};
  }
  const double achieved = sup_distance(net, quantize_weights(net, {max_F, R}), test_grid);
  throw NumericalError("quantize", "no F <= " + std::to_string(max_F) + " reaches sup error " + format_double(eta) +
                                       " (best " + format_double(achieved) + ")",
                       achieved);
}

}  // namespace sparsenet

#endif  // SPARSENET_QUANTIZE_HPP
