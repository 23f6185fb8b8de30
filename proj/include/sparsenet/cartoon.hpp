#ifndef SPARSENET_CARTOON_HPP
#define SPARSENET_CARTOON_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sparsenet/error.hpp"
#include "sparsenet/format.hpp"
#include "sparsenet/grid.hpp"

namespace sparsenet {

/// exp(1 - 1/(1 - u^2)) on |u| < 1, zero elsewhere; peak value 1 at u = 0.
inline double smooth_bump(double u) noexcept {
  const double s = 1.0 - u * u;
  if (!(s > 0.0)) return 0.0;
  return std::exp(1.0 - 1.0 / s);
}

/// amplitude * psi((x - cx) / half) * psi((y - cy) / half).
struct TensorBump {
  double amplitude = 0.0;
  std::array<double, 2> center{0.5, 0.5};
  double half_width = 0.45;

  double operator()(double x, double y) const noexcept {
    if (amplitude == 0.0) return 0.0;
    return amplitude * smooth_bump((x - center[0]) / half_width) * smooth_bump((y - center[1]) / half_width);
  }
};

struct RadiusTerm {
  double amplitude = 0.0;
  double phase = 0.0;
};

struct CartoonParams {
  double beta = 2.0;
  double nu = 1.0;
  std::uint64_t seed = 1;
  std::size_t harmonics = 8;
  double base_radius = 0.28;
  /// Radius coefficients are drawn from roughness * nu * U(-1, 1) * j^{-(beta + 1)}.
  double roughness = 0.1;
  double r_min = 0.1;
  double r_max = 0.45;
  std::size_t retries = 32;

  void validate() const {
    detail::require(beta >= 1.0 && beta <= 2.0, "cartoon: beta must lie in [1, 2]");
    detail::require(nu > 0.0 && std::isfinite(nu), "cartoon: nu must be > 0");
    detail::require(roughness >= 0.0 && roughness <= 1.0, "cartoon: roughness must lie in [0, 1]");
    detail::require(r_min > 0.0 && r_min < base_radius && base_radius < r_max && r_max < 0.5,
                    "cartoon: need 0 < r_min < base radius < r_max < 1/2");
    detail::require(retries >= 1, "cartoon: need at least one attempt");
  }
};

/// f = f0 + chi_B f1 on [0, 1]^2 with B star-shaped about `center`.
struct CartoonFunction {
  double beta = 2.0;
  double nu = 1.0;
  std::uint64_t seed = 1;
  std::array<double, 2> center{0.5, 0.5};
  double base_radius = 0.28;
  std::vector<RadiusTerm> radius_terms;
  TensorBump f0;
  TensorBump f1;

  double radius(double theta) const noexcept {
    double r = base_radius;
    for (std::size_t j = 0; j < radius_terms.size(); ++j) {
      r += radius_terms[j].amplitude * std::cos(static_cast<double>(j + 1) * theta + radius_terms[j].phase);
    }
    return r;
  }

  /// Boundary points count as outside.
  bool inside(double x, double y) const noexcept {
    const double dx = x - center[0];
    const double dy = y - center[1];
    const double rho = std::hypot(dx, dy);
    return rho < radius(std::atan2(dy, dx));
  }

  double operator()(double x, double y) const noexcept {
    const double base = f0(x, y);
    return inside(x, y) ? base + f1(x, y) : base;
  }

  double operator()(std::span<const double> x) const noexcept { return (*this)(x[0], x[1]); }

  /// Upper bound on |r(theta) - base_radius|.
  double radius_deviation_bound() const noexcept {
    double s = 0.0;
    for (const auto& t : radius_terms) s += std::abs(t.amplitude);
    return s;
  }
};

namespace detail {

inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/**
 * Seeded instance with trigonometric boundary radius and C-infinity tensor bumps for f0, f1.
 * Coefficients are redrawn until r stays inside (r_min, r_max).
 */
inline CartoonFunction generate_cartoon(const CartoonParams& p) {
  p.validate();
  std::mt19937_64 rng(p.seed);
  CartoonFunction c;
  c.beta = p.beta;
  c.nu = p.nu;
  c.seed = p.seed;
  c.base_radius = p.base_radius;
  c.center = {0.5 + 0.06 * (detail::unit_uniform(rng) - 0.5), 0.5 + 0.06 * (detail::unit_uniform(rng) - 0.5)};
  c.f0 = TensorBump{0.5 * p.nu, {0.5, 0.5}, 0.45};
  c.f1 = TensorBump{0.8 * p.nu, {0.45, 0.55}, 0.4};
  for (std::size_t attempt = 0; attempt < p.retries; ++attempt) {
    c.radius_terms.clear();
    for (std::size_t j = 1; j <= p.harmonics; ++j) {
      const double bound = p.nu * std::pow(static_cast<double>(j), -(p.beta + 1.0));
      const double a = p.roughness * bound * (2.0 * detail::unit_uniform(rng) - 1.0);
      const double phase = 2.0 * std::numbers::pi * detail::unit_uniform(rng);
      c.radius_terms.push_back({a, phase});
    }
    const double dev = c.radius_deviation_bound();
    if (c.base_radius - dev > p.r_min && c.base_radius + dev < p.r_max) return c;
  }
  throw ValidationError("cartoon: could not keep the boundary radius inside (" + format_double(p.r_min) + ", " +
                        format_double(p.r_max) + ") after " + std::to_string(p.retries) + " attempts");
}

inline SampledFunction sample_cartoon(const CartoonFunction& c, const Grid& grid) {
  detail::require(grid.dims() == 2, "cartoon: grid must be two-dimensional");
  return sample(grid, [&](std::span<const double> x) { return c(x); });
}

/// Largest absolute difference between horizontally or vertically adjacent samples.
inline double grid_jump_statistic(const SampledFunction& f) {
  const std::size_t n = f.grid.n();
  detail::require(f.grid.dims() == 2, "jump statistic: grid must be two-dimensional");
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = f.values[i * n + j];
      if (i + 1 < n) m = std::max(m, std::abs(f.values[(i + 1) * n + j] - v));
      if (j + 1 < n) m = std::max(m, std::abs(f.values[i * n + j + 1] - v));
    }
  }
  return m;
}

/// beta / 2.
inline double gamma_star_cartoon(double beta) {
  detail::require(beta >= 1.0 && beta <= 2.0, "gamma_star_cartoon: beta must lie in [1, 2]");
  return beta / 2.0;
}

/// chi_{<(cos t, sin t), x> > offset} times a smooth window filling the grid box.
inline SampledFunction line_singularity_target(double theta, double offset, const Grid& grid) {
  detail::require(grid.dims() == 2, "line target: grid must be two-dimensional");
  const Box& box = grid.box();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return sample(grid, [&](std::span<const double> x) {
    if (!(c * x[0] + s * x[1] > offset)) return 0.0;
    double w = 1.0;
    for (std::size_t k = 0; k < 2; ++k) {
      const double mid = 0.5 * (box[k].lo + box[k].hi);
      w *= smooth_bump((x[k] - mid) / (0.5 * box[k].length()));
    }
    return w;
  });
}

// Parameter file: one "key values..." record per line, '#' comments.

inline std::string cartoon_to_text(const CartoonFunction& c) {
  std::ostringstream out;
  out << "sparsenet-cartoon 1\n";
  out << "beta " << format_double(c.beta) << "\n";
  out << "nu " << format_double(c.nu) << "\n";
  out << "seed " << c.seed << "\n";
  out << "center " << format_double(c.center[0]) << " " << format_double(c.center[1]) << "\n";
  out << "base_radius " << format_double(c.base_radius) << "\n";
  for (std::size_t j = 0; j < c.radius_terms.size(); ++j) {
    out << "harmonic " << j + 1 << " " << format_double(c.radius_terms[j].amplitude) << " "
        << format_double(c.radius_terms[j].phase) << "\n";
  }
  auto bump_line = [&](const char* name, const TensorBump& b) {
    out << name << " " << format_double(b.amplitude) << " " << format_double(b.center[0]) << " "
        << format_double(b.center[1]) << " " << format_double(b.half_width) << "\n";
  };
  bump_line("f0", c.f0);
  bump_line("f1", c.f1);
  return out.str();
}

inline CartoonFunction cartoon_from_text(std::string_view text) {
  CartoonFunction c;
  std::size_t line_no = 0;
  bool header = false;
  std::size_t pos = 0;
  auto num = [&](std::string_view tok) {
    auto v = parse_double(tok);
    if (!v || !std::isfinite(*v)) throw ParseError("cartoon: bad number '" + std::string(tok) + "' on line " +
                                                       std::to_string(line_no), line_no);
    return *v;
  };
  auto need = [&](const std::vector<std::string_view>& toks, std::size_t n) {
    if (toks.size() != n) {
      throw ParseError("cartoon: '" + std::string(toks[0]) + "' expects " + std::to_string(n - 1) + " values on line " +
                           std::to_string(line_no), line_no);
    }
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
    if (!header) {
      if (toks.size() != 2 || toks[0] != "sparsenet-cartoon" || toks[1] != "1") {
        throw ParseError("cartoon: missing 'sparsenet-cartoon 1' header on line " + std::to_string(line_no), line_no);
      }
      header = true;
      continue;
    }
    const std::string_view key = toks[0];
    if (key == "beta") {
      need(toks, 2);
      c.beta = num(toks[1]);
    } else if (key == "nu") {
      need(toks, 2);
      c.nu = num(toks[1]);
    } else if (key == "seed") {
      need(toks, 2);
      auto v = parse_int(toks[1]);
      if (!v || *v < 0) throw ParseError("cartoon: bad seed on line " + std::to_string(line_no), line_no);
      c.seed = static_cast<std::uint64_t>(*v);
    } else if (key == "center") {
      need(toks, 3);
      c.center = {num(toks[1]), num(toks[2])};
    } else if (key == "base_radius") {
      need(toks, 2);
      c.base_radius = num(toks[1]);
    } else if (key == "harmonic") {
      need(toks, 4);
      auto j = parse_int(toks[1]);
      if (!j || *j != static_cast<long long>(c.radius_terms.size()) + 1) {
        throw ParseError("cartoon: harmonics must be numbered 1, 2, ... (line " + std::to_string(line_no) + ")", line_no);
      }
      c.radius_terms.push_back({num(toks[2]), num(toks[3])});
    } else if (key == "f0" || key == "f1") {
      need(toks, 5);
      TensorBump b{num(toks[1]), {num(toks[2]), num(toks[3])}, num(toks[4])};
      if (!(b.half_width > 0.0)) throw ParseError("cartoon: bump half width must be > 0 on line " + std::to_string(line_no), line_no);
      (key == "f0" ? c.f0 : c.f1) = b;
    } else {
      throw ParseError("cartoon: unknown key '" + std::string(key) + "' on line " + std::to_string(line_no), line_no);
    }
  }
  if (!header) throw ParseError("cartoon: empty parameter file", 0);
  detail::require(c.beta >= 1.0 && c.beta <= 2.0, "cartoon: beta must lie in [1, 2]");
  detail::require(c.nu > 0.0, "cartoon: nu must be > 0");
  detail::require(c.base_radius - c.radius_deviation_bound() > 0.0, "cartoon: boundary radius must stay positive");
  return c;
}

}  // namespace sparsenet

#endif  // SPARSENET_CARTOON_HPP
