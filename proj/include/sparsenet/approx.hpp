#ifndef SPARSENET_APPROX_HPP
#define SPARSENET_APPROX_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sparsenet/affine_system.hpp"
#include "sparsenet/error.hpp"
#include "sparsenet/grid.hpp"
#include "sparsenet/network.hpp"
#include "sparsenet/network_ops.hpp"

namespace sparsenet {

/// Discrete inner products <target, atom> and atom norms under the grid quadrature.
struct AtomStatistics {
  std::vector<double> coefficients;
  std::vector<double> norms;
};

namespace detail {

struct BlockAccumulator {
  std::array<std::pair<std::int64_t, std::int64_t>, 2> range{};
  std::size_t stride = 1;
  std::vector<double> coef;
  std::vector<double> norm2;

  std::size_t slot(std::int64_t b0, std::int64_t b1) const {
    return static_cast<std::size_t>(b0 - range[0].first) * stride + static_cast<std::size_t>(b1 - range[1].first);
  }
  bool contains(std::int64_t b0, std::int64_t b1) const {
    return b0 >= range[0].first && b0 <= range[0].second && b1 >= range[1].first && b1 <= range[1].second;
  }
};

}  // namespace detail

/**
 * Pixel-driven accumulation: every quadrature node visits only the translations whose
 * support contains it, tap by tap. Exact same values as sampling each atom separately.
 */
inline AtomStatistics analyze_atoms(const SampledFunction& target, const AffineSystem& sys, std::span<const Atom> atoms) {
  const Grid& grid = target.grid;
  const std::size_t d = sys.dims();
  detail::require(grid.dims() == d, "analysis: grid dimension does not match system");
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> by_block;
  for (std::size_t i = 0; i < atoms.size(); ++i) by_block[{atoms[i].variant, atoms[i].matrix}].push_back(i);

  AtomStatistics out{std::vector<double>(atoms.size(), 0.0), std::vector<double>(atoms.size(), 0.0)};
  const double weight = grid.cell_weight();
  const Generator& f = sys.generator();
  const Box& fs = f.support();
  const double delta = sys.delta();
  std::vector<double> local;
  std::vector<std::size_t> touched;

  for (const auto& [key, members] : by_block) {
    const auto [variant, matrix] = key;
    const AffineBlock block{variant, matrix};
    detail::BlockAccumulator acc;
    acc.range = sys.translation_range(block);
    if (d == 1) acc.range[1] = {0, 0};
    for (std::size_t i : members) {
      const Atom& a = atoms[i];
      acc.range[0].first = std::min(acc.range[0].first, a.translation[0]);
      acc.range[0].second = std::max(acc.range[0].second, a.translation[0]);
      acc.range[1].first = std::min(acc.range[1].first, a.translation[1]);
      acc.range[1].second = std::max(acc.range[1].second, a.translation[1]);
    }
    acc.stride = static_cast<std::size_t>(acc.range[1].second - acc.range[1].first + 1);
    const std::size_t slots = static_cast<std::size_t>(acc.range[0].second - acc.range[0].first + 1) * acc.stride;
    acc.coef.assign(slots, 0.0);
    acc.norm2.assign(slots, 0.0);

    const auto& a = sys.matrices()[matrix];
    const auto& terms = sys.variants()[variant].terms();
    const double scale = std::sqrt(sys.det(matrix));
    local.assign(slots, 0.0);

    std::array<double, 2> x{}, y{}, u{};
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
      if (!grid.is_cell_corner(flat)) continue;
      grid.point(flat, std::span<double>(x.data(), d));
      for (std::size_t r = 0; r < d; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * x[c];
        y[r] = s;
      }
      touched.clear();
      for (const auto& t : terms) {
        std::array<std::int64_t, 2> lo{0, 0}, hi{0, 0};
        std::array<double, 2> v{};
        for (std::size_t r = 0; r < d; ++r) {
          v[r] = y[r] - t.shift[r];
          lo[r] = static_cast<std::int64_t>(std::ceil((v[r] - fs[r].hi) / delta));
          hi[r] = static_cast<std::int64_t>(std::floor((v[r] - fs[r].lo) / delta));
        }
        for (std::int64_t b0 = lo[0]; b0 <= hi[0]; ++b0) {
          for (std::int64_t b1 = lo[1]; b1 <= hi[1]; ++b1) {
            if (!acc.contains(b0, b1)) continue;
            // Same arithmetic as atom_value: (A x - delta b) - shift.
            u[0] = (y[0] - delta * static_cast<double>(b0)) - t.shift[0];
            if (d == 2) u[1] = (y[1] - delta * static_cast<double>(b1)) - t.shift[1];
            const double val = f(std::span<const double>(u.data(), d));
            if (val == 0.0) continue;
            const std::size_t s = acc.slot(b0, b1);
            if (local[s] == 0.0) touched.push_back(s);
            local[s] += t.coefficient * val;
          }
        }
      }
      const double tv = target.values[flat];
      for (std::size_t s : touched) {
        const double g = scale * local[s];
        acc.coef[s] += tv * g;
        acc.norm2[s] += g * g;
        local[s] = 0.0;
      }
    }
    for (std::size_t i : members) {
      const std::size_t s = acc.slot(atoms[i].translation[0], atoms[i].translation[1]);
      out.coefficients[i] = weight * acc.coef[s];
      out.norms[i] = std::sqrt(weight * acc.norm2[s]);
    }
  }
  return out;
}

/// c_i = cell weight * sum(target * atom_i) over the quadrature nodes.
inline std::vector<double> analysis_coefficients(const SampledFunction& target, const AffineSystem& sys,
                                                 std::span<const Atom> atoms) {
  return analyze_atoms(target, sys, atoms).coefficients;
}

struct ExpansionTerm {
  std::size_t atom = 0;
  double coefficient = 0.0;
};

struct Expansion {
  std::vector<ExpansionTerm> terms;
  double residual = 0.0;
  std::size_t search_depth = 0;
  bool refit = false;
  /// Least-squares refit was ill-conditioned; thresholded coefficients were kept instead.
  bool refit_fallback = false;
  double max_abs_coefficient = 0.0;
  bool coefficient_bound_exceeded = false;
};

struct MTermOptions {
  std::size_t search_depth = 0;
  bool refit = true;
  double ridge = 1e-10;
  double coefficient_bound = 100.0;
};

/// Search depth 64 M^2 (at least M).
inline std::size_t default_search_depth(std::size_t m) {
  const std::size_t depth = 64 * m * m;
  return std::max(depth, m);
}

namespace detail {

inline Eigen::SparseMatrix<double> sample_matrix(const AffineSystem& sys, std::span<const Atom> atoms,
                                                 std::span<const std::size_t> selected, const Grid& grid,
                                                 bool quadrature_only) {
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t c = 0; c < selected.size(); ++c) {
    const SparseSamples s = atom_samples(atoms[selected[c]], sys, grid);
    for (std::size_t k = 0; k < s.index.size(); ++k) {
      if (quadrature_only && !grid.is_cell_corner(s.index[k])) continue;
      trip.emplace_back(static_cast<int>(s.index[k]), static_cast<int>(c), s.value[k]);
    }
  }
  Eigen::SparseMatrix<double> phi(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(selected.size()));
  phi.setFromTriplets(trip.begin(), trip.end());
  return phi;
}

}  // namespace detail

/// Samples sum_i c_i atom_i on every node of the grid.
inline SampledFunction synthesize(const Expansion& exp, const AffineSystem& sys, std::span<const Atom> atoms,
                                  const Grid& grid) {
  SampledFunction out(grid);
  for (const auto& t : exp.terms) {
    detail::require(t.atom < atoms.size(), "synthesize: atom index out of range");
    if (t.coefficient == 0.0) continue;
    const SparseSamples s = atom_samples(atoms[t.atom], sys, grid);
    for (std::size_t k = 0; k < s.index.size(); ++k) out.values[s.index[k]] += t.coefficient * s.value[k];
  }
  return out;
}

/**
 * Greedy M-term selection among the first search_depth atoms by |c_i| / ||atom_i||, ties to
 * the lower index; optional least-squares refit on the selected span.
 */
inline Expansion m_term_approx(const SampledFunction& target, const AffineSystem& sys, std::span<const Atom> atoms,
                               const AtomStatistics& stats, std::size_t m, const MTermOptions& options) {
  detail::require(stats.coefficients.size() == atoms.size() && stats.norms.size() == atoms.size(),
                  "m_term_approx: statistics do not match atom list");
  const std::size_t depth = options.search_depth == 0 ? default_search_depth(m) : options.search_depth;
  detail::require(depth >= m, "m_term_approx: search depth " + std::to_string(depth) + " is smaller than M = " +
                                  std::to_string(m));
  const std::size_t pool = std::min(depth, atoms.size());
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < pool; ++i) {
    if (stats.norms[i] > 0.0) candidates.push_back(i);
  }
  if (candidates.size() < m) {
    throw ValidationError("m_term_approx: requested M = " + std::to_string(m) + " but only " +
                          std::to_string(candidates.size()) + " nonzero atoms among the first " +
                          std::to_string(pool));
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(stats.coefficients[a]) / stats.norms[a] > std::abs(stats.coefficients[b]) / stats.norms[b];
  });
  candidates.resize(m);
  std::sort(candidates.begin(), candidates.end());

  Expansion exp;
  exp.search_depth = depth;
  exp.refit = options.refit;
  const Grid& grid = target.grid;
  if (m == 0) {
    exp.residual = grid_l2(target);
    return exp;
  }

  Eigen::VectorXd c(static_cast<Eigen::Index>(m));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) {
    rhs(static_cast<Eigen::Index>(k)) = stats.coefficients[candidates[k]];
    const double n = stats.norms[candidates[k]];
    c(static_cast<Eigen::Index>(k)) = stats.coefficients[candidates[k]] / (n * n);
  }
  if (options.refit) {
    const Eigen::SparseMatrix<double> phi = detail::sample_matrix(sys, atoms, candidates, grid, true);
    Eigen::MatrixXd gram = Eigen::MatrixXd(phi.transpose() * phi) * grid.cell_weight();
    gram.diagonal().array() += options.ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const Eigen::VectorXd sol = ldlt.solve(rhs);
    const bool ok = ldlt.info() == Eigen::Success && sol.allFinite() && ldlt.rcond() > 1e-15;
    if (ok) {
      c = sol;
    } else {
      exp.refit_fallback = true;
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    const double v = c(static_cast<Eigen::Index>(k));
    exp.terms.push_back({candidates[k], v});
    exp.max_abs_coefficient = std::max(exp.max_abs_coefficient, std::abs(v));
  }
  exp.coefficient_bound_exceeded = exp.max_abs_coefficient > options.coefficient_bound;
  exp.residual = grid_norms(target, synthesize(exp, sys, atoms, grid)).l2;
  return exp;
}

/**
 * Exhaustive best M-term residual: least squares over every M-subset of the first `count` atoms.
 * Exponential; only meant as a reference on toy systems.
 */
inline double exhaustive_m_term_residual(const SampledFunction& target, const AffineSystem& sys,
                                         std::span<const Atom> atoms, std::size_t m) {
  const std::size_t n = atoms.size();
  detail::require(n <= 20, "exhaustive search: at most 20 atoms");
  detail::require(m <= n, "exhaustive search: M exceeds the atom count");
  const Grid& grid = target.grid;
  if (m == 0) return grid_l2(target);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const Eigen::MatrixXd phi = Eigen::MatrixXd(detail::sample_matrix(sys, atoms, all, grid, true));
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.is_cell_corner(i)) rows.push_back(static_cast<Eigen::Index>(i));
  }
  const double w = grid.cell_weight();
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) y(static_cast<Eigen::Index>(r)) = target.values[static_cast<std::size_t>(rows[r])];
  double best = INFINITY;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(m), true);
  do {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!pick[j]) continue;
      for (std::size_t r = 0; r < rows.size(); ++r) a(static_cast<Eigen::Index>(r), col) = phi(rows[r], static_cast<Eigen::Index>(j));
      ++col;
    }
    const Eigen::VectorXd c = a.completeOrthogonalDecomposition().solve(y);
    best = std::min(best, std::sqrt(w * (y - a * c).squaredNorm()));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

struct RateFit {
  std::vector<std::pair<double, double>> points;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;

  double gamma() const noexcept { return -slope; }
};

/// Least-squares line through (log2 M, log2 error).
inline RateFit estimate_rate(std::vector<std::pair<double, double>> points) {
  detail::require(points.size() >= 3, "estimate_rate: need at least three points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].second > 0.0)) throw ValidationError("estimate_rate: errors must be positive");
    if (!(points[i].first > 0.0)) throw ValidationError("estimate_rate: M must be positive");
    if (i > 0 && !(points[i].first > points[i - 1].first)) {
      throw ValidationError("estimate_rate: M must be strictly increasing");
    }
  }
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [m, e] : points) {
    sx += std::log2(m);
    sy += std::log2(e);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [m, e] : points) {
    const double dx = std::log2(m) - mx, dy = std::log2(e) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  RateFit fit;
  fit.points = std::move(points);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

struct TransferResult {
  Network net;
  /// R' such that every atom network has at most R' + 1 edges.
  std::size_t per_atom_edges = 0;
  std::size_t connectivity = 0;
};

/// Edge bound of one atom network: taps * (d * N_1 + edges of layers 2..L).
inline std::size_t atom_edge_bound(const AffineSystem& sys) {
  detail::require(sys.generator().network().has_value(), "transfer: generator has no network realization");
  const Network& g = *sys.generator().network();
  std::size_t rest = 0;
  for (std::size_t l = 1; l < g.depth(); ++l) rest += g.layer(l).nnz();
  const std::size_t per_copy = g.depth() == 1 ? sys.dims() * g.layer(0).rows()
                                              : sys.dims() * g.layer(0).rows() + rest;
  std::size_t taps = 0;
  for (const auto& v : sys.variants()) taps = std::max(taps, v.size());
  return taps * per_copy;
}

/// One network computing sum_i c_i atom_i exactly (network-backed generator).
inline TransferResult transfer_to_network(const Expansion& exp, const AffineSystem& sys, std::span<const Atom> atoms) {
  const std::size_t bound = atom_edge_bound(sys);
  TransferResult out{constant_network(sys.dims(), {0.0}, sys.generator().network()->activation()), bound - 1, 0};
  std::vector<Network> nets;
  std::vector<double> coeffs;
  for (const auto& t : exp.terms) {
    detail::require(t.atom < atoms.size(), "transfer: atom index out of range");
    if (t.coefficient == 0.0) continue;
    nets.push_back(sys.atom_network(atoms[t.atom]));
    coeffs.push_back(t.coefficient);
  }
  if (!nets.empty()) {
    std::size_t depth = 0;
    for (const auto& n : nets) depth = std::max(depth, n.depth());
    for (auto& n : nets) n = pad_to_depth(n, depth);
    out.net = parallel_sum(nets, coeffs);
  }
  out.connectivity = out.net.connectivity();
  return out;
}

}  // namespace sparsenet

#endif  // SPARSENET_APPROX_HPP
