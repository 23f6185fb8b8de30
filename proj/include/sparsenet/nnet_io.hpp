#ifndef SPARSENET_NNET_IO_HPP
#define SPARSENET_NNET_IO_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparsenet/activation.hpp"
#include "sparsenet/error.hpp"
#include "sparsenet/format.hpp"
#include "sparsenet/network.hpp"

namespace sparsenet {

/*
 * Line-oriented text format:
 *
 *   NNET 1
 *   activation relu | smooth_relu <K> | sigmoidal <k> <scale>
 *   d <input dim>
 *   L <layer count>
 *   layer <l> <rows> <cols>
 *   A <l> <row> <col> <weight>
 *   b <l> <row> <value>
 *
 * Indices are 1-based. Blank lines and lines starting with '#' are ignored.
 */

inline std::string write_nnet(const Network& net) {
  std::string out = "NNET 1\nactivation " + net.activation().name();
  switch (net.activation().kind()) {
    case ActivationKind::relu:
      break;
    case ActivationKind::smooth_relu:
      out += " " + format_double(net.activation().knee());
      break;
    case ActivationKind::sigmoidal:
      out += " " + std::to_string(net.activation().order()) + " " + format_double(net.activation().scale());
      break;
  }
  out += "\nd " + std::to_string(net.input_dim()) + "\nL " + std::to_string(net.depth()) + "\n";
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const AffineLayer& layer = net.layer(l);
    const std::string tag = std::to_string(l + 1);
    out += "layer " + tag + " " + std::to_string(layer.rows()) + " " + std::to_string(layer.cols()) + "\n";
    for (const auto& e : layer.entries()) {
      out += "A " + tag + " " + std::to_string(e.row + 1) + " " + std::to_string(e.col + 1) + " " +
             format_double(e.weight) + "\n";
    }
    for (std::size_t r = 0; r < layer.rows(); ++r) {
      if (layer.bias()[r] != 0.0) {
        out += "b " + tag + " " + std::to_string(r + 1) + " " + format_double(layer.bias()[r]) + "\n";
      }
    }
  }
  return out;
}

inline Network read_nnet(std::string_view text) {
  struct PendingLayer {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Entry> entries;
    std::vector<double> bias;
  };
  std::optional<Activation> activation;
  std::optional<std::size_t> d;
  std::optional<std::size_t> depth;
  std::vector<PendingLayer> layers;
  bool header = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto fail = [&](const std::string& msg) { throw ParseError("nnet line " + std::to_string(line_no) + ": " + msg, line_no); };
  auto count = [&](std::string_view tok, const char* what) -> std::size_t {
    auto v = parse_int(tok);
    if (!v || *v < 0) fail(std::string("bad ") + what + " '" + std::string(tok) + "'");
    return static_cast<std::size_t>(*v);
  };
  auto number = [&](std::string_view tok) -> double {
    auto v = parse_double(tok);
    if (!v) fail("bad number '" + std::string(tok) + "'");
    return *v;
  };
  auto layer_ref = [&](std::string_view tok) -> PendingLayer& {
    const std::size_t l = count(tok, "layer index");
    if (l < 1 || l > layers.size()) fail("layer " + std::string(tok) + " not declared");
    return layers[l - 1];
  };

  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;

    const std::string_view key = tok[0];
    if (!header) {
      if (key != "NNET" || tok.size() != 2 || tok[1] != "1") fail("expected header 'NNET 1'");
      header = true;
    } else if (key == "activation") {
      if (tok.size() < 2 || tok.size() > 4) fail("activation takes a name and up to two parameters");
      const double p1 = tok.size() > 2 ? number(tok[2]) : 0.0;
      const double p2 = tok.size() > 3 ? number(tok[3]) : 0.0;
      try {
        activation = parse_activation(std::string(tok[1]), p1, p2);
      } catch (const ValidationError& e) {
        fail(e.what());
      }
    } else if (key == "d") {
      if (tok.size() != 2) fail("d takes one value");
      d = count(tok[1], "input dimension");
    } else if (key == "L") {
      if (tok.size() != 2) fail("L takes one value");
      depth = count(tok[1], "layer count");
    } else if (key == "layer") {
      if (tok.size() != 4) fail("layer takes index, rows, cols");
      if (!d || !depth) fail("layer declared before d and L");
      const std::size_t l = count(tok[1], "layer index");
      if (l != layers.size() + 1) fail("layers must be declared in order");
      if (l > *depth) fail("more layers than L");
      PendingLayer pl;
      pl.rows = count(tok[2], "row count");
      pl.cols = count(tok[3], "column count");
      pl.bias.assign(pl.rows, 0.0);
      layers.push_back(std::move(pl));
    } else if (key == "A") {
      if (tok.size() != 5) fail("A takes layer, row, col, weight");
      PendingLayer& pl = layer_ref(tok[1]);
      const std::size_t r = count(tok[2], "row");
      const std::size_t c = count(tok[3], "column");
      if (r < 1 || r > pl.rows || c < 1 || c > pl.cols) fail("entry index out of range");
      pl.entries.push_back({r - 1, c - 1, number(tok[4])});
    } else if (key == "b") {
      if (tok.size() != 4) fail("b takes layer, row, value");
      PendingLayer& pl = layer_ref(tok[1]);
      const std::size_t r = count(tok[2], "row");
      if (r < 1 || r > pl.rows) fail("bias index out of range");
      pl.bias[r - 1] = number(tok[3]);
    } else {
      fail("unknown key '" + std::string(key) + "'");
    }
  }

  if (!header) throw ParseError("nnet: empty input", 0);
  if (!activation) throw ParseError("nnet: missing activation", line_no);
  if (!d || !depth) throw ParseError("nnet: missing d or L", line_no);
  if (layers.size() != *depth) throw ParseError("nnet: declared L does not match layer count", line_no);
  std::vector<AffineLayer> built;
  try {
    for (auto& pl : layers) built.emplace_back(pl.rows, pl.cols, std::move(pl.entries), std::move(pl.bias));
    return Network(*d, std::move(built), *activation);
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(std::string("nnet: ") + e.what(), line_no);
  }
}

inline Network load_nnet(const std::filesystem::path& path) { return read_nnet(read_file(path)); }

inline void save_nnet(const std::filesystem::path& path, const Network& net) {
  write_file_atomic(path, write_nnet(net));
}

}  // namespace sparsenet

#endif  // SPARSENET_NNET_IO_HPP
