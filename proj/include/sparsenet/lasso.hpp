#ifndef SPARSENET_LASSO_HPP
#define SPARSENET_LASSO_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sparsenet/error.hpp"

namespace sparsenet {

inline double soft_threshold(double v, double lambda) noexcept {
  if (v > lambda) return v - lambda;
  if (v < -lambda) return v + lambda;
  return 0.0;
}

struct LassoOptions {
  double tolerance = 1e-8;
  std::size_t max_sweeps = 10000;
  /// Sweeps between exact active-set solves (0 disables them).
  std::size_t polish_every = 50;
  double polish_tolerance = 1e-10;
};

struct LassoResult {
  Eigen::VectorXd coefficients;
  std::size_t sweeps = 0;
  bool converged = false;
  /// The active-set solve replaced the coordinate descent iterate.
  bool polished = false;

  std::size_t active() const { return static_cast<std::size_t>((coefficients.array() != 0.0).count()); }
};

namespace detail {

/// Optimality violation from g = F^T (y - F c).
inline double kkt_from_gradient(const Eigen::VectorXd& g, const Eigen::VectorXd& c, double lambda) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double v = c(i) == 0.0 ? std::max(0.0, std::abs(g(i)) - lambda)
                                 : std::abs(g(i) - lambda * (c(i) > 0.0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace detail

namespace detail {

/// Solves G_AA z_A = (F^T y)_A - lambda s_A on the listed coordinates.
inline std::optional<Eigen::VectorXd> signed_solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& fty,
                                                   const std::vector<Eigen::Index>& act, const Eigen::VectorXd& sign,
                                                   double lambda) {
  const auto k = static_cast<Eigen::Index>(act.size());
  Eigen::MatrixXd gaa(k, k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const Eigen::Index j = act[static_cast<std::size_t>(a)];
    for (Eigen::Index b = 0; b < k; ++b) gaa(a, b) = gram(j, act[static_cast<std::size_t>(b)]);
    rhs(a) = fty(j) - lambda * sign(j);
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gaa);
  Eigen::VectorXd sol = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !sol.allFinite()) return std::nullopt;
  return sol;
}

/**
 * Active-set refinement from c: solve on the support with fixed signs; if a coefficient would
 * change sign, stop where it hits zero and drop it; otherwise admit the worst violator.
 * Returns the final point, or nothing when a solve breaks down.
 */
inline std::optional<Eigen::VectorXd> active_set_refine(const Eigen::MatrixXd& gram, const Eigen::VectorXd& fty,
                                                        Eigen::VectorXd c, double lambda, double tolerance) {
  const Eigen::Index n = c.size();
  Eigen::VectorXd sign = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Index> act;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (c(j) != 0.0) {
      act.push_back(j);
      sign(j) = c(j) > 0.0 ? 1.0 : -1.0;
    }
  }
  for (Eigen::Index iter = 0; iter < 4 * n + 16; ++iter) {
    if (!act.empty()) {
      const auto sol = signed_solve(gram, fty, act, sign, lambda);
      if (!sol) return std::nullopt;
      double step = 1.0;
      std::size_t blocking = act.size();
      for (std::size_t a = 0; a < act.size(); ++a) {
        const Eigen::Index j = act[a];
        const double z = (*sol)(static_cast<Eigen::Index>(a));
        if (z * sign(j) <= 0.0) {
          const double t = c(j) / (c(j) - z);
          if (t < step) {
            step = t;
            blocking = a;
          }
        }
      }
      for (std::size_t a = 0; a < act.size(); ++a) {
        const Eigen::Index j = act[a];
        c(j) += step * ((*sol)(static_cast<Eigen::Index>(a)) - c(j));
      }
      if (blocking < act.size()) {
        const Eigen::Index j = act[blocking];
        c(j) = 0.0;
        sign(j) = 0.0;
        act.erase(act.begin() + static_cast<std::ptrdiff_t>(blocking));
        continue;
      }
    }
    const Eigen::VectorXd g = fty - gram * c;
    Eigen::Index worst = -1;
    double excess = tolerance;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (sign(j) == 0.0 && std::abs(g(j)) - lambda > excess) {
        excess = std::abs(g(j)) - lambda;
        worst = j;
      }
    }
    if (worst < 0) return c;
    sign(worst) = g(worst) > 0.0 ? 1.0 : -1.0;
    act.push_back(worst);
  }
  return c;
}

}  // namespace detail

/**
 * Cyclic coordinate descent on 0.5 ||y - F c||^2 + lambda ||c||_1 given G = F^T F and F^T y,
 * columns visited in index order. Stops when the largest coordinate change in a sweep drops below
 * the tolerance. g = F^T y - G c is kept current, so one update costs O(cols).
 *
 * Descent crawls on strongly correlated columns, so every polish_every sweeps an active-set
 * refinement is run from the iterate; its point is taken once the violation is below polish_tolerance.
 */
inline LassoResult lasso_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& fty, double lambda,
                              const Eigen::VectorXd& warm_start = {}, const LassoOptions& options = {}) {
  detail::require(lambda >= 0.0 && std::isfinite(lambda), "lasso: lambda must be >= 0");
  detail::require(gram.rows() == gram.cols() && gram.rows() == fty.size(), "lasso: Gram matrix size mismatch");
  const Eigen::Index n = gram.cols();
  LassoResult out;
  out.coefficients = warm_start.size() == n ? warm_start : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g = fty - gram * out.coefficients;
  auto polish = [&](bool final_attempt) {
    const auto cand = detail::active_set_refine(gram, fty, out.coefficients, lambda, options.polish_tolerance);
    if (!cand) return false;
    const double kkt = detail::kkt_from_gradient(fty - gram * *cand, *cand, lambda);
    const bool good = final_attempt ? kkt < detail::kkt_from_gradient(g, out.coefficients, lambda)
                                    : kkt <= options.polish_tolerance;
    if (good) {
      out.coefficients = *cand;
      out.polished = true;
    }
    return good;
  };
  for (out.sweeps = 1; out.sweeps <= options.max_sweeps; ++out.sweeps) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double old = out.coefficients(j);
      const double sq = gram(j, j);
      if (sq == 0.0) {
        out.coefficients(j) = 0.0;
        continue;
      }
      const double updated = soft_threshold(g(j) + sq * old, lambda) / sq;
      if (updated != old) {
        g.noalias() -= (updated - old) * gram.col(j);
        out.coefficients(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    if (max_change < options.tolerance) {
      out.converged = true;
      break;
    }
    if (options.polish_every > 0 && out.sweeps % options.polish_every == 0 && polish(false)) {
      out.converged = true;
      break;
    }
  }
  out.sweeps = std::min(out.sweeps, options.max_sweeps);
  if (!out.converged && options.polish_every > 0) polish(true);
  return out;
}

inline LassoResult lasso(const Eigen::MatrixXd& f, const Eigen::VectorXd& y, double lambda,
                         const Eigen::VectorXd& warm_start = {}, const LassoOptions& options = {}) {
  detail::require(f.rows() == y.size(), "lasso: feature rows do not match target length");
  return lasso_gram(f.transpose() * f, f.transpose() * y, lambda, warm_start, options);
}

/// ||F^T y||_inf: the smallest lambda with an all-zero solution.
inline double lasso_lambda_max(const Eigen::MatrixXd& f, const Eigen::VectorXd& y) {
  return (f.transpose() * y).cwiseAbs().maxCoeff();
}

/**
 * Largest violation of the optimality conditions: |g_i| <= lambda where c_i = 0 and
 * g_i = lambda sign(c_i) elsewhere, with g = F^T (y - F c).
 */
inline double lasso_kkt_violation(const Eigen::MatrixXd& f, const Eigen::VectorXd& y, const Eigen::VectorXd& c,
                                  double lambda) {
  return detail::kkt_from_gradient(f.transpose() * (y - f * c), c, lambda);
}

struct LassoPathPoint {
  double lambda = 0.0;
  LassoResult result;
};

/**
 * Geometric lambda grid from 0.5 lambda_max down to floor_fraction lambda_max with warm starts.
 * Returns the smallest lambda whose active set has at most max_active entries.
 */
inline LassoPathPoint lasso_path_select(const Eigen::MatrixXd& f, const Eigen::VectorXd& y, std::size_t max_active,
                                        std::size_t steps = 40, double floor_fraction = 1e-4,
                                        const LassoOptions& options = {}) {
  detail::require(steps >= 1, "lasso path: need at least one lambda");
  detail::require(floor_fraction > 0.0 && floor_fraction < 0.5, "lasso path: floor fraction must lie in (0, 1/2)");
  const Eigen::MatrixXd gram = f.transpose() * f;
  const Eigen::VectorXd fty = f.transpose() * y;
  const double lmax = fty.cwiseAbs().maxCoeff();
  LassoPathPoint best{lmax, LassoResult{Eigen::VectorXd::Zero(f.cols()), 0, true}};
  if (lmax == 0.0) return best;
  const double ratio = steps == 1 ? 1.0 : std::pow(floor_fraction / 0.5, 1.0 / static_cast<double>(steps - 1));
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(f.cols());
  double lambda = 0.5 * lmax;
  for (std::size_t s = 0; s < steps; ++s, lambda *= ratio) {
    LassoResult r = lasso_gram(gram, fty, lambda, warm, options);
    if (r.active() > max_active) break;
    warm = r.coefficients;
    best = {lambda, std::move(r)};
  }
  return best;
}

}  // namespace sparsenet

#endif  // SPARSENET_LASSO_HPP
