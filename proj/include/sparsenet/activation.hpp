#ifndef SPARSENET_ACTIVATION_HPP
#define SPARSENET_ACTIVATION_HPP

#include <cmath>
#include <string>

#include "sparsenet/error.hpp"

namespace sparsenet {

enum class ActivationKind { relu, smooth_relu, sigmoidal };

/**
 * Componentwise activation.
 *
 *  - relu:        max{0, x}
 *  - smooth_relu: 0 for x <= 0, x for x >= K, cubic splice 2x^2/K - x^3/K^2 on [0, K]
 *                 (C^1, monotone, nonnegative)
 *  - sigmoidal:   x^k / (1 + exp(-x / s)), a sigmoidal function of order k
 */
class Activation {
 public:
  static Activation relu() { return Activation(ActivationKind::relu, 0.0, 0, 0.0); }

  static Activation smooth_relu(double knee = 1.0) {
    detail::require(knee > 0.0 && std::isfinite(knee), "smooth_relu: knee K must be > 0");
    return Activation(ActivationKind::smooth_relu, knee, 0, 0.0);
  }

  static Activation sigmoidal(int order = 2, double scale = 1.0) {
    detail::require(order >= 2, "sigmoidal: order k must be >= 2");
    detail::require(scale > 0.0 && std::isfinite(scale), "sigmoidal: scale must be > 0");
    return Activation(ActivationKind::sigmoidal, 0.0, order, scale);
  }

  ActivationKind kind() const noexcept { return kind_; }
  double knee() const noexcept { return knee_; }
  int order() const noexcept { return order_; }
  double scale() const noexcept { return scale_; }

  /// True when rho(x) - rho(-x) == x exactly for every x.
  bool has_exact_identity_pair() const noexcept { return kind_ == ActivationKind::relu; }

  /// True when rho vanishes on (-inf, 0].
  bool vanishes_on_negatives() const noexcept { return kind_ != ActivationKind::sigmoidal; }

  double operator()(double x) const noexcept {
    switch (kind_) {
      case ActivationKind::relu:
        return x > 0.0 ? x : 0.0;
      case ActivationKind::smooth_relu:
        if (x <= 0.0) return 0.0;
        if (x >= knee_) return x;
        return x * x * (2.0 / knee_ - x / (knee_ * knee_));
      case ActivationKind::sigmoidal:
        return std::pow(x, order_) / (1.0 + std::exp(-x / scale_));
    }
    return 0.0;
  }

  /// Derivative; the ReLU subgradient at 0 is taken to be 0.
  double derivative(double x) const noexcept {
    switch (kind_) {
      case ActivationKind::relu:
        return x > 0.0 ? 1.0 : 0.0;
      case ActivationKind::smooth_relu:
        if (x <= 0.0) return 0.0;
        if (x >= knee_) return 1.0;
        return x * (4.0 / knee_ - 3.0 * x / (knee_ * knee_));
      case ActivationKind::sigmoidal: {
        const double sig = 1.0 / (1.0 + std::exp(-x / scale_));
        const double xk1 = std::pow(x, order_ - 1);
        return order_ * xk1 * sig + xk1 * x * sig * (1.0 - sig) / scale_;
      }
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind_) {
      case ActivationKind::relu:
        return "relu";
      case ActivationKind::smooth_relu:
        return "smooth_relu";
      case ActivationKind::sigmoidal:
        return "sigmoidal";
    }
    return "unknown";
  }

  friend bool operator==(const Activation&, const Activation&) = default;

 private:
  Activation(ActivationKind kind, double knee, int order, double scale)
      : kind_(kind), knee_(knee), order_(order), scale_(scale) {}

  ActivationKind kind_;
  double knee_;
  int order_;
  double scale_;
};

/// Parses "relu", "smooth_relu" (optional knee) or "sigmoidal" (optional order, scale).
inline Activation parse_activation(const std::string& name, double p1 = 0.0, double p2 = 0.0) {
  if (name == "relu") return Activation::relu();
  if (name == "smooth_relu") return Activation::smooth_relu(p1 > 0.0 ? p1 : 1.0);
  if (name == "sigmoidal") {
    return Activation::sigmoidal(p1 >= 2.0 ? static_cast<int>(p1) : 2, p2 > 0.0 ? p2 : 1.0);
  }
  throw ValidationError("unknown activation '" + name + "'");
}

}  // namespace sparsenet

#endif  // SPARSENET_ACTIVATION_HPP
