#ifndef SPARSENET_CODEC_HPP
#define SPARSENET_CODEC_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sparsenet/activation.hpp"
#include "sparsenet/bitstream.hpp"
#include "sparsenet/error.hpp"
#include "sparsenet/format.hpp"
#include "sparsenet/network.hpp"
#include "sparsenet/network_ops.hpp"
#include "sparsenet/quantize.hpp"

namespace sparsenet {

/*
 * Payload layout for M > 0 edges (all integers unsigned, MSB first):
 *
 *   1^M' 0          M' = smallest power of two >= max(M, 2)
 *   1^d 0           input dimension in unary, so the field width below is known
 *   L               B bits, B = ceil(log2(M' + d)) + 1
 *   d, N_1..N_L     B bits each
 *   topology        per node (inputs first, then layer by layer): child indices
 *                   (1-based global, ascending), each list closed by a zero block;
 *                   one extra zero block at the end
 *   weights         per node: W-bit bias (zero for inputs), then the W-bit weight
 *                   of each edge to its children, in child order
 *
 * For M = 0 the payload is a single 0 bit followed by the W-bit output bias.
 * Weights are two's-complement integers w * 2^F with W = F + R + 1.
 */

struct EncodedNetwork {
  QuantizationSpec spec;
  Bitstream payload;

  /// "NNB1" | F | R | packed payload, zero padded to a byte boundary.
  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out{'N', 'N', 'B', '1', static_cast<std::uint8_t>(spec.fractional_bits),
                                  static_cast<std::uint8_t>(spec.range_bits)};
    out.reserve(out.size() + payload.bytes().size());
    for (std::uint8_t byte : payload.bytes()) out.push_back(byte);
    return out;
  }

  static EncodedNetwork from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 6 || bytes[0] != 'N' || bytes[1] != 'N' || bytes[2] != 'B' || bytes[3] != '1') {
      throw ParseError("nnb: bad magic", 0);
    }
    EncodedNetwork enc;
    enc.spec = {bytes[4], bytes[5]};
    try {
      enc.spec.validate();
    } catch (const ValidationError& e) {
      throw ParseError(std::string("nnb: ") + e.what(), 32);
    }
    enc.payload = Bitstream::from_bytes(bytes.subspan(6));
    return enc;
  }
};

namespace detail {

inline std::size_t padded_edge_count(std::size_t m) {
  std::size_t p = 2;
  while (p < m) p *= 2;
  return p;
}

inline unsigned ceil_log2(std::size_t v) {
  unsigned k = 0;
  while ((std::size_t{1} << k) < v) ++k;
  return k;
}

inline std::uint64_t twos_complement(std::int64_t v, unsigned width) {
  return static_cast<std::uint64_t>(v) & ((width >= 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1));
}

inline std::int64_t from_twos_complement(std::uint64_t v, unsigned width) {
  const std::uint64_t sign = std::uint64_t{1} << (width - 1);
  return (v & sign) ? static_cast<std::int64_t>(v) - static_cast<std::int64_t>(sign << 1)
                    : static_cast<std::int64_t>(v);
}

}  // namespace detail

/// Upper bound on the payload length in bits for M edges, input dimension d and weight width W.
inline std::size_t code_length_bound(std::size_t m, std::size_t d, std::size_t w, std::size_t outputs = 1) {
  if (m == 0) return 1 + w * outputs;
  const std::size_t mt = detail::padded_edge_count(m) + d;
  const std::size_t lg = detail::ceil_log2(mt);
  return 5 * mt + 4 * mt * lg + 2 * lg + 1 + 3 * mt * w;
}

/// True when the network has no hidden node without outgoing edges and no all-zero layer (unless L = 1).
inline bool is_normalized(const Network& net) {
  if (net.depth() > 1) {
    for (const auto& layer : net.layers()) {
      if (layer.nnz() == 0) return false;
    }
  }
  for (std::size_t l = 0; l + 1 < net.depth(); ++l) {
    std::vector<bool> used(net.layer(l).rows(), false);
    for (const auto& e : net.layer(l + 1).entries()) used[e.col] = true;
    if (!std::all_of(used.begin(), used.end(), [](bool u) { return u; })) return false;
  }
  return true;
}

inline EncodedNetwork encode_network(const Network& net, const QuantizationSpec& spec) {
  spec.validate();
  if (!is_normalized(net)) throw ValidationError("encode_network: network is not normalized");
  const unsigned w = static_cast<unsigned>(spec.width());
  auto code_of = [&](double v, const std::string& where) {
    std::int64_t code = 0;
    if (!spec.to_code(v, code)) {
      throw ValidationError("encode_network: " + where + " value " + format_double(v) + " is not on the 2^-" +
                            std::to_string(spec.fractional_bits) + " grid within range 2^" +
                            std::to_string(spec.range_bits));
    }
    return detail::twos_complement(code, w);
  };

  EncodedNetwork enc;
  enc.spec = spec;
  Bitstream& out = enc.payload;
  const std::size_t m = net.connectivity();
  const std::size_t d = net.input_dim();

  if (m == 0) {
    if (net.output_dim() != 1) throw ValidationError("encode_network: edgeless networks must have a scalar output");
    out.push(false);
    out.push_bits(code_of(net.layer(0).bias()[0], "output bias"), w);
    return enc;
  }

  const std::size_t mp = detail::padded_edge_count(m);
  const unsigned b = detail::ceil_log2(mp + d) + 1;
  const std::size_t depth = net.depth();
  std::size_t total_nodes = d;
  for (const auto& layer : net.layers()) total_nodes += layer.rows();
  const std::uint64_t capacity = (b >= 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << b) - 1);
  if (total_nodes > capacity || depth > capacity) {
    throw ValidationError("encode_network: " + std::to_string(total_nodes) + " nodes do not fit in " +
                          std::to_string(b) + "-bit indices");
  }

  out.push_unary(mp);
  out.push_unary(d);
  out.push_bits(depth, b);
  out.push_bits(d, b);
  for (const auto& layer : net.layers()) out.push_bits(layer.rows(), b);

  // Children of layer-l nodes are the rows of layer l (0-based): gather them per column.
  std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>> children(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    const AffineLayer& layer = net.layer(l);
    children[l].resize(layer.cols());
    for (const auto& e : layer.entries()) children[l][e.col].emplace_back(e.row, e.weight);
  }

  std::vector<std::size_t> first_index(depth + 1);
  first_index[0] = 1;
  for (std::size_t l = 0; l < depth; ++l) first_index[l + 1] = first_index[l] + net.layer(l).cols();

  for (std::size_t l = 0; l <= depth; ++l) {
    const std::size_t count = (l == 0) ? d : net.layer(l - 1).rows();
    for (std::size_t i = 0; i < count; ++i) {
      if (l < depth) {
        for (const auto& [row, weight] : children[l][i]) out.push_bits(first_index[l + 1] + row, b);
      }
      out.push_bits(0, b);
    }
  }
  out.push_bits(0, b);

  for (std::size_t l = 0; l <= depth; ++l) {
    const std::size_t count = (l == 0) ? d : net.layer(l - 1).rows();
    for (std::size_t i = 0; i < count; ++i) {
      const double bias = (l == 0) ? 0.0 : net.layer(l - 1).bias()[i];
      out.push_bits(code_of(bias, "bias"), w);
      if (l < depth) {
        for (const auto& [row, weight] : children[l][i]) out.push_bits(code_of(weight, "edge"), w);
      }
    }
  }

  const std::size_t bound = code_length_bound(m, d, w);
  if (out.size() > bound) {
    throw NumericalError("encode", "payload of " + std::to_string(out.size()) + " bits exceeds bound " +
                                       std::to_string(bound),
                         static_cast<double>(out.size()));
  }
  return enc;
}

/**
 * Inverse of encode_network. Edgeless payloads carry no input dimension; they decode to a
 * constant network on `edgeless_input_dim` inputs.
 */
inline Network decode_network(const EncodedNetwork& enc, const Activation& activation,
                              std::size_t edgeless_input_dim = 1) {
  enc.spec.validate();
  const QuantizationSpec& spec = enc.spec;
  const unsigned w = static_cast<unsigned>(spec.width());
  BitReader in(enc.payload);
  auto value = [&]() { return spec.from_code(detail::from_twos_complement(in.read_bits(w), w)); };

  if (!in.read()) {
    const double bias = value();
    return constant_network(edgeless_input_dim, {bias}, activation);
  }
  constexpr std::size_t unary_limit = std::size_t{1} << 26;
  const std::size_t mp = 1 + in.read_unary(unary_limit);
  if (mp < 2 || (mp & (mp - 1)) != 0) {
    throw ParseError("decode: edge prefix " + std::to_string(mp) + " is not a power of two", in.position());
  }
  const std::size_t d_unary = in.read_unary(unary_limit);
  if (d_unary == 0) throw ParseError("decode: input dimension is zero", in.position());
  const unsigned b = detail::ceil_log2(mp + d_unary) + 1;
  if (b > 63) throw ParseError("decode: field width too large", in.position());

  const std::size_t depth = in.read_bits(b);
  const std::size_t d = in.read_bits(b);
  if (d != d_unary) {
    throw ParseError("decode: input dimension fields disagree (" + std::to_string(d_unary) + " vs " +
                         std::to_string(d) + ")",
                     in.position());
  }
  if (depth == 0) throw ParseError("decode: zero layers", in.position());
  if (depth > mp + d) throw ParseError("decode: layer count exceeds edge budget", in.position());
  std::vector<std::size_t> widths{d};
  std::size_t total = d;
  for (std::size_t l = 0; l < depth; ++l) {
    const std::size_t n = in.read_bits(b);
    if (n == 0) throw ParseError("decode: layer " + std::to_string(l + 1) + " is empty", in.position());
    widths.push_back(n);
    total += n;
    if (total >= (std::size_t{1} << b)) throw ParseError("decode: node count exceeds index range", in.position());
  }
  std::vector<std::size_t> first_index(depth + 2);
  first_index[0] = 1;
  for (std::size_t l = 0; l <= depth; ++l) first_index[l + 1] = first_index[l] + widths[l];

  std::vector<std::vector<std::vector<std::size_t>>> children(depth + 1);
  std::size_t m = 0;
  for (std::size_t l = 0; l <= depth; ++l) {
    children[l].resize(widths[l]);
    for (std::size_t i = 0; i < widths[l]; ++i) {
      for (;;) {
        const std::size_t at = in.position();
        const std::size_t idx = in.read_bits(b);
        if (idx == 0) break;
        if (l == depth || idx < first_index[l + 1] || idx >= first_index[l + 2]) {
          throw ParseError("decode: child index " + std::to_string(idx) + " out of range at bit " + std::to_string(at),
                           at);
        }
        auto& list = children[l][i];
        if (!list.empty() && idx <= first_index[l + 1] + list.back()) {
          throw ParseError("decode: child indices not ascending at bit " + std::to_string(at), at);
        }
        list.push_back(idx - first_index[l + 1]);
        if (++m > mp) throw ParseError("decode: more edges than the prefix allows", at);
      }
    }
  }
  {
    const std::size_t at = in.position();
    if (in.read_bits(b) != 0) throw ParseError("decode: missing topology terminator at bit " + std::to_string(at), at);
  }
  if (detail::padded_edge_count(m) != mp) {
    throw ParseError("decode: edge count " + std::to_string(m) + " inconsistent with prefix " + std::to_string(mp),
                     in.position());
  }

  std::vector<std::vector<Entry>> entries(depth);
  std::vector<std::vector<double>> biases(depth);
  for (std::size_t l = 0; l <= depth; ++l) {
    for (std::size_t i = 0; i < widths[l]; ++i) {
      const std::size_t at = in.position();
      const double bias = value();
      if (l == 0) {
        if (bias != 0.0) throw ParseError("decode: nonzero input-node weight at bit " + std::to_string(at), at);
      } else {
        biases[l - 1].push_back(bias);
      }
      for (std::size_t child : children[l][i]) {
        const std::size_t wat = in.position();
        const double weight = value();
        if (weight == 0.0) throw ParseError("decode: zero edge weight at bit " + std::to_string(wat), wat);
        entries[l].push_back({child, i, weight});
      }
    }
  }
  std::vector<AffineLayer> layers;
  for (std::size_t l = 0; l < depth; ++l) {
    layers.emplace_back(widths[l + 1], widths[l], std::move(entries[l]), std::move(biases[l]));
  }
  return Network(d, std::move(layers), activation);
}

inline void save_nnb(const std::filesystem::path& path, const EncodedNetwork& enc) {
  const auto bytes = enc.to_bytes();
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

inline EncodedNetwork load_nnb(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  return EncodedNetwork::from_bytes(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

}  // namespace sparsenet

#endif  // SPARSENET_CODEC_HPP
