#ifndef SPARSENET_LEARN_HPP
#define SPARSENET_LEARN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sparsenet/approx.hpp"
#include "sparsenet/codec.hpp"
#include "sparsenet/error.hpp"
#include "sparsenet/format.hpp"
#include "sparsenet/network_ops.hpp"
#include "sparsenet/quantize.hpp"

namespace sparsenet {

/// M_eps = ceil((C / eps)^{1 / gamma}).
inline std::size_t learn_term_count(double eps, double gamma, double c) {
  detail::require(eps > 0.0 && eps < 0.5, "learn: eps must lie in (0, 1/2)");
  detail::require(gamma > 0.0 && std::isfinite(gamma), "learn: gamma must be > 0");
  detail::require(c > 0.0 && std::isfinite(c), "learn: C must be > 0");
  const double m = std::ceil(std::pow(c / eps, 1.0 / gamma) - 1e-9);
  if (!(m <= 1e8)) throw ValidationError("learn: M_eps = " + format_double(m) + " is too large");
  return static_cast<std::size_t>(m);
}

/// Rate constants with err(M) <= C M^{-gamma} / 2 on every measured point.
struct RateCalibration {
  double c = 1.0;
  double gamma = 1.0;
};

inline RateCalibration calibrate_rate(const RateFit& fit) {
  detail::require(fit.gamma() > 0.0, "calibrate: fitted rate must be positive");
  RateCalibration cal{0.0, fit.gamma()};
  for (const auto& [m, e] : fit.points) cal.c = std::max(cal.c, 2.0 * e * std::pow(m, cal.gamma));
  return cal;
}

struct LearnOptions {
  MTermOptions mterm;
  int max_fractional_bits = 40;
};

struct LearnReport {
  double epsilon = 0.0;
  std::size_t terms = 0;
  std::size_t edges = 0;
  std::size_t bits = 0;
  QuantizationSpec spec;
  double mterm_error = 0.0;
  double transfer_error = 0.0;
  double quantize_sup_error = 0.0;
  double final_error = 0.0;
  bool refit_fallback = false;
  bool coefficient_bound_exceeded = false;

  std::string text() const {
    std::string s;
    s += "epsilon " + format_double(epsilon) + "\n";
    s += "M_eps " + std::to_string(terms) + "\n";
    s += "edges " + std::to_string(edges) + "\n";
    s += "bits " + std::to_string(bits) + "\n";
    s += "F " + std::to_string(spec.fractional_bits) + "\n";
    s += "R " + std::to_string(spec.range_bits) + "\n";
    s += "mterm_l2 " + format_double(mterm_error) + "\n";
    s += "transfer_l2 " + format_double(transfer_error) + "\n";
    s += "quantize_sup " + format_double(quantize_sup_error) + "\n";
    s += "final_l2 " + format_double(final_error) + "\n";
    if (refit_fallback) s += "warning refit fell back to thresholded coefficients\n";
    if (coefficient_bound_exceeded) s += "warning coefficient bound exceeded\n";
    return s;
  }
};

struct LearnResult {
  Network net;
  EncodedNetwork encoded;
  LearnReport report;
};

/**
 * M-term approximation with M_eps terms (budget eps/2), exact transfer (eps/4), quantization
 * with a sup budget mapped to eps/4 in L2, then encoding. Every stage is checked on the target grid.
 */
inline LearnResult learn_pipeline(const SampledFunction& target, const AffineSystem& sys, std::span<const Atom> atoms,
                                  const AtomStatistics& stats, double eps, double gamma, double c,
                                  const LearnOptions& options = {}) {
  const Grid& grid = target.grid;
  LearnReport rep;
  rep.epsilon = eps;
  rep.terms = learn_term_count(eps, gamma, c);

  const Expansion exp = m_term_approx(target, sys, atoms, stats, rep.terms, options.mterm);
  rep.mterm_error = exp.residual;
  rep.refit_fallback = exp.refit_fallback;
  rep.coefficient_bound_exceeded = exp.coefficient_bound_exceeded;
  if (!(exp.residual <= eps / 2.0)) {
    throw NumericalError("m-term", "residual " + format_double(exp.residual) + " exceeds eps/2 = " +
                                       format_double(eps / 2.0) + " with M = " + std::to_string(rep.terms),
                         exp.residual);
  }

  const TransferResult tr = transfer_to_network(exp, sys, atoms);
  const SampledFunction synth = synthesize(exp, sys, atoms, grid);
  rep.transfer_error = grid_norms(synth, sample_network(tr.net, grid)).l2;
  if (!(rep.transfer_error <= eps / 4.0)) {
    throw NumericalError("transfer", "network differs from expansion by " + format_double(rep.transfer_error),
                         rep.transfer_error);
  }

  const double eta = eps / (4.0 * std::sqrt(box_volume(grid.box())));
  QuantizeResult q = quantize_network(tr.net, eta, grid, options.max_fractional_bits, range_bits_for(tr.net));
  rep.quantize_sup_error = q.sup_error;
  rep.spec = q.spec;
  Network net = normalize_network(q.net);

  rep.final_error = grid_norms(target, sample_network(net, grid)).l2;
  if (!(rep.final_error <= eps)) {
    throw NumericalError("learn", "final error " + format_double(rep.final_error) + " exceeds eps = " +
                                      format_double(eps),
                         rep.final_error);
  }
  EncodedNetwork enc = encode_network(net, q.spec);
  rep.edges = net.connectivity();
  rep.bits = enc.payload.size();
  return {std::move(net), std::move(enc), rep};
}

struct RateRow {
  std::size_t m = 0;
  std::size_t edges = 0;
  std::size_t bits = 0;
  double l2_error = 0.0;
  /// Error of the transferred network itself (equal to l2_error up to rounding for exact generators).
  double network_error = 0.0;
};

struct RateExperiment {
  std::vector<RateRow> rows;
  RateFit fit;
  double gamma_star = 0.0;

  std::string csv() const {
    CsvWriter w({"M", "edges", "bits", "l2_error"});
    for (const auto& r : rows) {
      w.row({std::to_string(r.m), std::to_string(r.edges), std::to_string(r.bits), format_double(r.l2_error)});
    }
    return w.str();
  }

  std::string report() const {
    std::string s;
    s += "gamma_hat " + format_double(fit.gamma()) + "\n";
    s += "r_squared " + format_double(fit.r_squared) + "\n";
    s += "gamma_star " + format_double(gamma_star) + "\n";
    return s;
  }
};

struct RateOptions {
  MTermOptions mterm;
  /// Build each transferred network and measure its own grid error.
  bool measure_networks = false;
  /// Fractional bits assumed for the reported code-length bound.
  int fractional_bits = 16;
};

/// M-term curve over `ms`, the M-edge curve through transfer, and the fitted rate.
inline RateExperiment rate_experiment(const SampledFunction& target, const AffineSystem& sys,
                                      std::span<const Atom> atoms, const AtomStatistics& stats,
                                      std::span<const std::size_t> ms, double gamma_star,
                                      const RateOptions& options = {}) {
  RateExperiment out;
  out.gamma_star = gamma_star;
  std::vector<std::pair<double, double>> points;
  for (std::size_t m : ms) {
    const Expansion exp = m_term_approx(target, sys, atoms, stats, m, options.mterm);
    RateRow row;
    row.m = m;
    row.l2_error = exp.residual;
    const TransferResult tr = transfer_to_network(exp, sys, atoms);
    row.edges = tr.connectivity;
    const QuantizationSpec spec{options.fractional_bits, range_bits_for(tr.net)};
    row.bits = code_length_bound(row.edges, sys.dims(), static_cast<std::size_t>(spec.width()));
    row.network_error = options.measure_networks ? grid_norms(target, sample_network(tr.net, target.grid)).l2
                                                 : exp.residual;
    out.rows.push_back(row);
    points.emplace_back(static_cast<double>(m), exp.residual);
  }
  out.fit = estimate_rate(std::move(points));
  return out;
}

}  // namespace sparsenet

#endif  // SPARSENET_LEARN_HPP
