#ifndef SPARSENET_GENERATOR_HPP
#define SPARSENET_GENERATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sparsenet/activation.hpp"
#include "sparsenet/error.hpp"
#include "sparsenet/grid.hpp"
#include "sparsenet/network.hpp"
#include "sparsenet/network_ops.hpp"

namespace sparsenet {

/// Bump g(scale * x) where g is the three-layer bump built from hat shifts (p1, p2, p3).
struct BumpShape {
  Activation activation = Activation::relu();
  std::size_t dims = 2;
  double p1 = 1.0;
  double p2 = 1.0;
  double p3 = 2.0;
  double scale = 1.0;
};

/// Closed-form evaluation of a bump with the same operation order as its network.
class Bump {
 public:
  explicit Bump(BumpShape shape) : shape_(std::move(shape)) {
    detail::require(shape_.scale > 0.0 && std::isfinite(shape_.scale), "bump: scale must be positive");
    net_ = bump_network(shape_.activation, shape_.dims, shape_.p1, shape_.p2, shape_.p3);
    if (shape_.scale != 1.0) {
      std::vector<AffineLayer> layers = net_.layers();
      const AffineLayer& first = layers.front();
      std::vector<Entry> entries(first.entries().begin(), first.entries().end());
      for (auto& e : entries) e.weight = shape_.scale;
      layers.front() = AffineLayer(first.rows(), first.cols(), std::move(entries),
                                   std::vector<double>(first.bias().begin(), first.bias().end()));
      net_ = Network(shape_.dims, std::move(layers), shape_.activation);
    }
    terms_ = hat_terms(shape_.p1, shape_.p2, shape_.p3);
    offset_ = net_.layer(1).bias()[0];
    support_end_ = hat_support_end(shape_.activation, shape_.p3) / shape_.scale;
  }

  const BumpShape& shape() const noexcept { return shape_; }
  const Network& network() const noexcept { return net_; }

  Box support() const { return Box(shape_.dims, Interval{0.0, support_end_}); }

  double operator()(std::span<const double> x) const noexcept {
    const Activation& act = shape_.activation;
    double z = offset_;
    for (std::size_t i = 0; i < shape_.dims; ++i) {
      const double u = shape_.scale * x[i];
      for (const auto& [shift, c] : terms_) z += c * act(u + (-shift));
    }
    return act(z);
  }

 private:
  BumpShape shape_;
  Network net_{1, {AffineLayer(1, 1)}, Activation::relu()};
  std::vector<std::pair<double, double>> terms_;
  double offset_ = 0.0;
  double support_end_ = 0.0;
};

/// Compactly supported function on R^d with a known support box, optionally realized by a network.
class Generator {
 public:
  using Function = std::function<double(std::span<const double>)>;

  Generator(Function fn, Box support, std::optional<Network> network = std::nullopt)
      : fn_(std::move(fn)), support_(std::move(support)), network_(std::move(network)) {
    detail::require(static_cast<bool>(fn_), "generator: empty function");
    detail::require(!support_.empty(), "generator: support must be a bounded box");
    for (const auto& iv : support_) {
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.hi >= iv.lo)) {
        throw ValidationError("generator: support must be a bounded box");
      }
    }
    if (network_) {
      detail::require(network_->input_dim() == support_.size() && network_->output_dim() == 1,
                      "generator: network shape does not match support");
    }
  }

  static Generator from_bump(const Bump& bump) {
    return Generator([bump](std::span<const double> x) { return bump(x); }, bump.support(), bump.network());
  }

  std::size_t dims() const noexcept { return support_.size(); }
  const Box& support() const noexcept { return support_; }
  const std::optional<Network>& network() const noexcept { return network_; }
  double operator()(std::span<const double> x) const { return fn_(x); }

 private:
  Function fn_;
  Box support_;
  std::optional<Network> network_;
};

struct TranslateTerm {
  double coefficient = 1.0;
  std::vector<double> shift;
};

/// g(x) = sum_i c_i f(x - d_i) over a fixed generator f.
class TranslateCombination {
 public:
  TranslateCombination() = default;
  TranslateCombination(std::string name, std::vector<TranslateTerm> terms)
      : name_(std::move(name)), terms_(std::move(terms)) {
    detail::require(!terms_.empty(), "translate combination: need at least one term");
    for (const auto& t : terms_) {
      detail::require(std::isfinite(t.coefficient), "translate combination: non-finite coefficient");
      detail::require(t.shift.size() == terms_.front().shift.size(), "translate combination: shift dimensions differ");
    }
  }

  static TranslateCombination identity(std::size_t d, std::string name = "lowpass") {
    return TranslateCombination(std::move(name), {TranslateTerm{1.0, std::vector<double>(d, 0.0)}});
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<TranslateTerm>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  /// Bounding box of the union of the shifted generator supports.
  Box support(const Generator& f) const {
    check(f);
    Box box = f.support();
    for (std::size_t k = 0; k < box.size(); ++k) {
      double lo = INFINITY;
      double hi = -INFINITY;
      for (const auto& t : terms_) {
        lo = std::min(lo, f.support()[k].lo + t.shift[k]);
        hi = std::max(hi, f.support()[k].hi + t.shift[k]);
      }
      box[k] = {lo, hi};
    }
    return box;
  }

  double evaluate(const Generator& f, std::span<const double> x) const {
    std::vector<double> y(x.size());
    double s = 0.0;
    for (const auto& t : terms_) {
      for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] - t.shift[k];
      s += t.coefficient * f(y);
    }
    return s;
  }

  /// Exact network realization; requires a network-backed generator.
  Network network(const Generator& f) const {
    check(f);
    if (!f.network()) throw ValidationError("translate combination: generator has no network realization");
    std::vector<double> coeffs;
    std::vector<std::vector<double>> shifts;
    for (const auto& t : terms_) {
      coeffs.push_back(t.coefficient);
      shifts.push_back(t.shift);
    }
    return sum_of_translates(*f.network(), coeffs, shifts);
  }

 private:
  void check(const Generator& f) const {
    detail::require(terms_.front().shift.size() == f.dims(), "translate combination: dimension mismatch with generator");
  }

  std::string name_;
  std::vector<TranslateTerm> terms_;
};

inline double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

/**
 * R translates of f along `axis` spaced 1/B with alternating binomial weights binom(R-1, l)(-1)^l.
 * Moments of order 0..R-2 along the axis vanish.
 */
inline TranslateCombination make_vanishing_moments(const Generator& f, std::size_t taps, double spacing_inverse,
                                                   std::size_t axis, std::string name = "cone") {
  if (taps == 0) throw ValidationError("make_vanishing_moments: R must be >= 1");
  detail::require(spacing_inverse > 0.0 && std::isfinite(spacing_inverse), "make_vanishing_moments: B must be > 0");
  detail::require(axis < f.dims(), "make_vanishing_moments: axis out of range");
  std::vector<TranslateTerm> terms;
  for (std::size_t l = 0; l < taps; ++l) {
    std::vector<double> shift(f.dims(), 0.0);
    shift[axis] = static_cast<double>(l) / spacing_inverse;
    const double sign = (l % 2 == 0) ? 1.0 : -1.0;
    terms.push_back({sign * binomial(taps - 1, l), std::move(shift)});
  }
  return TranslateCombination(std::move(name), std::move(terms));
}

/**
 * Trapezoid-rule moments int x_axis^p g dx_axis, p = 0..max_order, along one line through `base`.
 * Nodes span [lo, hi] uniformly.
 */
inline std::vector<double> directional_moments(const std::function<double(std::span<const double>)>& g,
                                               std::span<const double> base, std::size_t axis, double lo, double hi,
                                               std::size_t nodes, std::size_t max_order) {
  detail::require(nodes >= 2 && hi > lo, "directional_moments: need at least two nodes on a nonempty interval");
  std::vector<double> x(base.begin(), base.end());
  std::vector<double> out(max_order + 1, 0.0);
  const double h = (hi - lo) / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) {
    x[axis] = lo + h * static_cast<double>(i);
    const double w = (i == 0 || i + 1 == nodes) ? 0.5 * h : h;
    const double v = g(x);
    double pw = 1.0;
    for (std::size_t p = 0; p <= max_order; ++p) {
      out[p] += w * pw * v;
      pw *= x[axis];
    }
  }
  return out;
}

}  // namespace sparsenet

#endif  // SPARSENET_GENERATOR_HPP
