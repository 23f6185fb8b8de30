#ifndef SPARSENET_TESTS_RANDOM_NETWORKS_HPP
#define SPARSENET_TESTS_RANDOM_NETWORKS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "sparsenet/network.hpp"
#include "sparsenet/quantize.hpp"

namespace sparsenet::fixtures {

/// Nonzero value on the quantization grid.
inline double random_grid_value(std::mt19937_64& rng, const QuantizationSpec& spec, bool allow_zero) {
  const std::int64_t lo = -(std::int64_t{1} << (spec.range_bits + spec.fractional_bits));
  const std::int64_t hi = -lo - 1;
  std::uniform_int_distribution<std::int64_t> code(lo, hi);
  for (;;) {
    const std::int64_t c = code(rng);
    if (c != 0 || allow_zero) return spec.from_code(c);
  }
}

/**
 * Random normalized network with on-grid weights: every hidden node has an outgoing edge and
 * every non-input node has an incoming edge. Roughly `target_edges` edges.
 */
inline Network random_normalized_network(std::mt19937_64& rng, std::size_t d, std::size_t depth,
                                         std::size_t target_edges, const QuantizationSpec& spec) {
  std::vector<std::size_t> widths{d};
  const std::size_t per_layer = std::max<std::size_t>(1, target_edges / depth);
  const std::size_t max_w =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(per_layer))) + 1);
  std::uniform_int_distribution<std::size_t> width(1, max_w);
  for (std::size_t l = 0; l + 1 < depth; ++l) widths.push_back(width(rng));
  widths.push_back(1);

  std::vector<AffineLayer> layers;
  for (std::size_t l = 0; l < depth; ++l) {
    const std::size_t rows = widths[l + 1];
    const std::size_t cols = widths[l];
    std::set<std::pair<std::size_t, std::size_t>> cells;
    std::uniform_int_distribution<std::size_t> pick_r(0, rows - 1);
    std::uniform_int_distribution<std::size_t> pick_c(0, cols - 1);
    for (std::size_t c = 0; c < cols; ++c) {
      if (l > 0) cells.insert({pick_r(rng), c});
    }
    for (std::size_t r = 0; r < rows; ++r) cells.insert({r, pick_c(rng)});
    const std::size_t want = std::min(rows * cols, std::max(cells.size(), per_layer));
    while (cells.size() < want) cells.insert({pick_r(rng), pick_c(rng)});
    std::vector<Entry> entries;
    for (const auto& [r, c] : cells) entries.push_back({r, c, random_grid_value(rng, spec, false)});
    std::vector<double> bias(rows);
    for (double& b : bias) b = random_grid_value(rng, spec, true);
    layers.emplace_back(rows, cols, std::move(entries), std::move(bias));
  }
  return Network(d, std::move(layers), Activation::relu());
}

/// d = 2, three layers with exactly 4n edges: dense n x 2, diagonal n x n, dense 1 x n.
inline Network chain_network(std::mt19937_64& rng, std::size_t n, const QuantizationSpec& spec) {
  std::vector<Entry> first, middle, last;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < 2; ++c) first.push_back({r, c, random_grid_value(rng, spec, false)});
    middle.push_back({r, r, random_grid_value(rng, spec, false)});
    last.push_back({0, r, random_grid_value(rng, spec, false)});
  }
  auto biases = [&](std::size_t k) {
    std::vector<double> b(k);
    for (double& x : b) x = random_grid_value(rng, spec, true);
    return b;
  };
  std::vector<AffineLayer> layers;
  layers.emplace_back(n, 2, std::move(first), biases(n));
  layers.emplace_back(n, n, std::move(middle), biases(n));
  layers.emplace_back(1, n, std::move(last), biases(1));
  return Network(2, std::move(layers), Activation::relu());
}

}  // namespace sparsenet::fixtures

#endif  // SPARSENET_TESTS_RANDOM_NETWORKS_HPP
