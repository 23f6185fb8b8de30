#ifndef SPARSENET_AFFINE_SYSTEM_HPP
#define SPARSENET_AFFINE_SYSTEM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sparsenet/error.hpp"
#include "sparsenet/format.hpp"
#include "sparsenet/generator.hpp"
#include "sparsenet/grid.hpp"
#include "sparsenet/network.hpp"
#include "sparsenet/network_ops.hpp"

namespace sparsenet {

/// Structured label of a dilation matrix; shearlet systems fill scale, shear and cone.
struct MatrixLabel {
  std::string part = "affine";
  int scale = 0;
  int shear = 0;
  int cone = 0;
};

/// One sub-system D_{s,j}: variant s paired with matrix j.
struct AffineBlock {
  std::size_t variant = 0;
  std::size_t matrix = 0;
};

struct Atom {
  std::uint32_t variant = 0;
  std::uint32_t matrix = 0;
  std::array<std::int64_t, 2> translation{0, 0};

  friend bool operator==(const Atom&, const Atom&) = default;
};

/**
 * Family |det A_j|^{1/2} g_s(A_j x - delta b) restricted to a box domain, where each g_s is a
 * translate combination of one generator. Only the listed (s, j) blocks are populated.
 * Matrices must be full rank with non-decreasing |det|. Supports d = 1 and d = 2.
 */
class AffineSystem {
 public:
  AffineSystem(Generator generator, std::vector<TranslateCombination> variants, std::vector<Eigen::MatrixXd> matrices,
               std::vector<AffineBlock> blocks, double delta, Box domain, std::vector<MatrixLabel> labels = {})
      : generator_(std::move(generator)),
        variants_(std::move(variants)),
        matrices_(std::move(matrices)),
        blocks_(std::move(blocks)),
        delta_(delta),
        domain_(std::move(domain)),
        labels_(std::move(labels)) {
    const std::size_t d = generator_.dims();
    detail::require(d == 1 || d == 2, "affine system: only dimensions 1 and 2 are supported");
    detail::require(domain_.size() == d, "affine system: domain dimension does not match generator");
    detail::require(delta_ > 0.0 && std::isfinite(delta_), "affine system: delta must be > 0");
    detail::require(!variants_.empty() && !matrices_.empty(), "affine system: need variants and matrices");
    if (labels_.empty()) labels_.resize(matrices_.size());
    detail::require(labels_.size() == matrices_.size(), "affine system: one label per matrix");
    for (auto& v : variants_) variant_support_.push_back(v.support(generator_));
    double prev = 0.0;
    for (std::size_t j = 0; j < matrices_.size(); ++j) {
      const auto& a = matrices_[j];
      detail::require(static_cast<std::size_t>(a.rows()) == d && static_cast<std::size_t>(a.cols()) == d,
                      "affine system: matrix " + std::to_string(j) + " has the wrong shape");
      const double det = std::abs(a.determinant());
      if (!(det >= 1e-12)) throw ValidationError("affine system: matrix " + std::to_string(j) + " is singular");
      if (det < prev * (1.0 - 1e-12)) {
        throw ValidationError("affine system: |det A_j| must be non-decreasing (matrix " + std::to_string(j) + ")");
      }
      prev = det;
      dets_.push_back(det);
      inverses_.push_back(a.inverse());
    }
    for (const auto& b : blocks_) {
      detail::require(b.variant < variants_.size() && b.matrix < matrices_.size(), "affine system: block out of range");
    }
  }

  std::size_t dims() const noexcept { return generator_.dims(); }
  const Generator& generator() const noexcept { return generator_; }
  const std::vector<TranslateCombination>& variants() const noexcept { return variants_; }
  const std::vector<Eigen::MatrixXd>& matrices() const noexcept { return matrices_; }
  const std::vector<AffineBlock>& blocks() const noexcept { return blocks_; }
  const std::vector<MatrixLabel>& labels() const noexcept { return labels_; }
  double delta() const noexcept { return delta_; }
  const Box& domain() const noexcept { return domain_; }
  double det(std::size_t j) const { return dets_.at(j); }
  const Eigen::MatrixXd& inverse(std::size_t j) const { return inverses_.at(j); }
  const Box& variant_support(std::size_t s) const { return variant_support_.at(s); }

  static double infinity_norm(const Eigen::MatrixXd& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

  /// c_b with ||b||_inf <= c_b ||A_j||_inf for every atom that meets the domain.
  double translation_bound_constant() const {
    double omega = 0.0;
    for (const auto& iv : domain_) omega = std::max({omega, std::abs(iv.lo), std::abs(iv.hi)});
    double supp = 0.0;
    for (const auto& box : variant_support_) {
      for (const auto& iv : box) supp = std::max({supp, std::abs(iv.lo), std::abs(iv.hi)});
    }
    // delta |b_r| <= ||A||_inf omega + supp.
    double c = 0.0;
    for (const auto& a : matrices_) c = std::max(c, (omega + supp / infinity_norm(a)) / delta_);
    return c;
  }

  /// Smallest eigenvalue magnitude over all matrices (reported; the family may contain values below 1).
  double min_eigenvalue_magnitude() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& a : matrices_) {
      Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) m = std::min(m, std::abs(es.eigenvalues()(i)));
    }
    return m;
  }

  /// Largest c with sum_{k<j} |det A_k| >= c ||A_j||_inf^a for all j >= 2 (1-based).
  double determinant_growth_constant(double exponent) const {
    double c = std::numeric_limits<double>::infinity();
    double partial = dets_.front();
    for (std::size_t j = 1; j < matrices_.size(); ++j) {
      c = std::min(c, partial / std::pow(infinity_norm(matrices_[j]), exponent));
      partial += dets_[j];
    }
    return c;
  }

  /// |det A_j|^{1/2} g_s(A_j x - delta b).
  /// Empirical c_o: min over matrices of (atoms using A_j) / |det A_j|. Zero if some matrix has no atom.
  double occupancy_constant(std::span<const Atom> atoms) const {
    std::vector<std::size_t> counts(matrices_.size(), 0);
    for (const auto& a : atoms) {
      if (a.matrix < counts.size()) ++counts[a.matrix];
    }
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < counts.size(); ++j) c = std::min(c, static_cast<double>(counts[j]) / dets_[j]);
    return c;
  }

  double atom_value(const Atom& atom, std::span<const double> x) const {
    const std::size_t d = dims();
    const auto& a = matrices_[atom.matrix];
    std::array<double, 2> y{0.0, 0.0};
    for (std::size_t r = 0; r < d; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * x[c];
      y[r] = s - delta_ * static_cast<double>(atom.translation[r]);
    }
    return std::sqrt(dets_[atom.matrix]) * variants_[atom.variant].evaluate(generator_, std::span<const double>(y.data(), d));
  }

  /// Exact support of an atom is the preimage of a box; this returns its bounding box in x.
  Box atom_bounding_box(const Atom& atom) const {
    const std::size_t d = dims();
    const Box& s = variant_support_[atom.variant];
    const auto& inv = inverses_[atom.matrix];
    Box out(d, Interval{INFINITY, -INFINITY});
    for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
      std::array<double, 2> y{};
      for (std::size_t k = 0; k < d; ++k) {
        y[k] = ((corner >> k) & 1u ? s[k].hi : s[k].lo) + delta_ * static_cast<double>(atom.translation[k]);
      }
      for (std::size_t r = 0; r < d; ++r) {
        double v = 0.0;
        for (std::size_t c = 0; c < d; ++c) v += inv(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * y[c];
        out[r].lo = std::min(out[r].lo, v);
        out[r].hi = std::max(out[r].hi, v);
      }
    }
    return out;
  }

  /// True when the atom's support box preimage and the domain share interior points.
  bool atom_meets_domain(const Atom& atom) const {
    const std::size_t d = dims();
    const auto& a = matrices_[atom.matrix];
    const Box& s = variant_support_[atom.variant];
    // Work in y = A x: the box Q = delta b + S against the parallelogram A(domain).
    std::vector<std::array<double, 2>> poly;
    for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
      std::array<double, 2> x{};
      for (std::size_t k = 0; k < d; ++k) x[k] = (corner >> k) & 1u ? domain_[k].hi : domain_[k].lo;
      std::array<double, 2> y{};
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) y[r] += a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * x[c];
      }
      poly.push_back(y);
    }
    std::array<double, 2> qlo{}, qhi{};
    for (std::size_t k = 0; k < d; ++k) {
      qlo[k] = s[k].lo + delta_ * static_cast<double>(atom.translation[k]);
      qhi[k] = s[k].hi + delta_ * static_cast<double>(atom.translation[k]);
    }
    auto overlaps = [&](double n0, double n1) {
      double plo = INFINITY, phi = -INFINITY;
      for (const auto& p : poly) {
        const double v = n0 * p[0] + n1 * p[1];
        plo = std::min(plo, v);
        phi = std::max(phi, v);
      }
      double blo = INFINITY, bhi = -INFINITY;
      for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
        const double c0 = corner & 1u ? qhi[0] : qlo[0];
        const double c1 = d == 2 ? ((corner & 2u) ? qhi[1] : qlo[1]) : 0.0;
        const double v = n0 * c0 + n1 * c1;
        blo = std::min(blo, v);
        bhi = std::max(bhi, v);
      }
      return std::max(plo, blo) < std::min(phi, bhi);
    };
    if (d == 1) return overlaps(1.0, 0.0);
    if (!overlaps(1.0, 0.0) || !overlaps(0.0, 1.0)) return false;
    // Edge normals of the parallelogram are the rows of A^{-T} columns: normals to A e_1 and A e_2.
    for (int k = 0; k < 2; ++k) {
      const double e0 = a(0, k);
      const double e1 = a(1, k);
      if (!overlaps(-e1, e0)) return false;
    }
    return true;
  }

  /// Candidate translation range for one block: every b whose box could meet A(domain).
  std::array<std::pair<std::int64_t, std::int64_t>, 2> translation_range(const AffineBlock& block) const {
    const std::size_t d = dims();
    const auto& a = matrices_[block.matrix];
    const Box& s = variant_support_[block.variant];
    std::array<std::pair<std::int64_t, std::int64_t>, 2> range{};
    for (std::size_t r = 0; r < d; ++r) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
        double v = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          v += a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
               (((corner >> c) & 1u) ? domain_[c].hi : domain_[c].lo);
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      range[r] = {static_cast<std::int64_t>(std::floor((lo - s[r].hi) / delta_)),
                  static_cast<std::int64_t>(std::ceil((hi - s[r].lo) / delta_))};
    }
    return range;
  }

  /// Network realizing one atom exactly (network-backed generators only).
  Network atom_network(const Atom& atom) const {
    const Network g = variants_[atom.variant].network(generator_);
    std::vector<double> shift(dims());
    for (std::size_t k = 0; k < dims(); ++k) shift[k] = delta_ * static_cast<double>(atom.translation[k]);
    return affine_transform_network(g, matrices_[atom.matrix], shift);
  }

 private:
  Generator generator_;
  std::vector<TranslateCombination> variants_;
  std::vector<Eigen::MatrixXd> matrices_;
  std::vector<AffineBlock> blocks_;
  double delta_;
  Box domain_;
  std::vector<MatrixLabel> labels_;
  std::vector<Box> variant_support_;
  std::vector<double> dets_;
  std::vector<Eigen::MatrixXd> inverses_;
};

/// Stable sort by |det A_j|, then variant, then matrix index, then translation (lexicographic).
inline std::vector<Atom> canonical_order(const AffineSystem& sys, std::vector<Atom> atoms) {
  std::stable_sort(atoms.begin(), atoms.end(), [&](const Atom& a, const Atom& b) {
    const double da = sys.det(a.matrix);
    const double db = sys.det(b.matrix);
    if (da != db) return da < db;
    if (a.variant != b.variant) return a.variant < b.variant;
    if (a.matrix != b.matrix) return a.matrix < b.matrix;
    return a.translation < b.translation;
  });
  return atoms;
}

/// All atoms of all blocks whose support meets the domain interior, in canonical order.
inline std::vector<Atom> enumerate_atoms(const AffineSystem& sys) {
  std::vector<Atom> atoms;
  const std::size_t d = sys.dims();
  for (const auto& block : sys.blocks()) {
    const auto range = sys.translation_range(block);
    const std::int64_t lo1 = d == 2 ? range[1].first : 0;
    const std::int64_t hi1 = d == 2 ? range[1].second : 0;
    for (std::int64_t b0 = range[0].first; b0 <= range[0].second; ++b0) {
      for (std::int64_t b1 = lo1; b1 <= hi1; ++b1) {
        Atom atom{static_cast<std::uint32_t>(block.variant), static_cast<std::uint32_t>(block.matrix), {b0, b1}};
        if (sys.atom_meets_domain(atom)) atoms.push_back(atom);
      }
    }
  }
  return canonical_order(sys, std::move(atoms));
}

/// Samples one atom on every grid node.
inline SampledFunction atom_evaluate(const Atom& atom, const AffineSystem& sys, const Grid& grid) {
  detail::require(grid.dims() == sys.dims(), "atom_evaluate: grid dimension does not match system");
  return sample(grid, [&](std::span<const double> x) { return sys.atom_value(atom, x); });
}

/// Sparse samples of one atom: flat grid indices inside its bounding box with nonzero value.
struct SparseSamples {
  std::vector<std::size_t> index;
  std::vector<double> value;
};

inline SparseSamples atom_samples(const Atom& atom, const AffineSystem& sys, const Grid& grid) {
  const std::size_t d = sys.dims();
  detail::require(grid.dims() == d, "atom_samples: grid dimension does not match system");
  const Box bb = sys.atom_bounding_box(atom);
  std::array<std::size_t, 2> lo{0, 0}, hi{0, 0};
  for (std::size_t k = 0; k < d; ++k) {
    const double h = grid.spacing(k);
    const double a = std::floor((bb[k].lo - grid.box()[k].lo) / h);
    const double b = std::ceil((bb[k].hi - grid.box()[k].lo) / h);
    const double top = static_cast<double>(grid.n() - 1);
    if (b < 0.0 || a > top) return {};
    lo[k] = static_cast<std::size_t>(std::max(0.0, a));
    hi[k] = static_cast<std::size_t>(std::min(top, b));
  }
  SparseSamples out;
  std::array<double, 2> x{};
  const std::size_t n = grid.n();
  if (d == 1) {
    for (std::size_t i = lo[0]; i <= hi[0]; ++i) {
      x[0] = grid.node(0, i);
      const double v = sys.atom_value(atom, std::span<const double>(x.data(), 1));
      if (v != 0.0) {
        out.index.push_back(i);
        out.value.push_back(v);
      }
    }
    return out;
  }
  for (std::size_t i = lo[0]; i <= hi[0]; ++i) {
    x[0] = grid.node(0, i);
    for (std::size_t j = lo[1]; j <= hi[1]; ++j) {
      x[1] = grid.node(1, j);
      const double v = sys.atom_value(atom, std::span<const double>(x.data(), 2));
      if (v != 0.0) {
        out.index.push_back(i * n + j);
        out.value.push_back(v);
      }
    }
  }
  return out;
}

/// Atom listing CSV: part, s, l, k, tau, b1, b2, detA, norm.
inline std::string atoms_csv(const AffineSystem& sys, std::span<const Atom> atoms, std::span<const double> norms) {
  detail::require(norms.size() == atoms.size(), "atoms_csv: one norm per atom");
  CsvWriter csv({"part", "s", "l", "k", "tau", "b1", "b2", "detA", "norm"});
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    const MatrixLabel& lab = sys.labels()[a.matrix];
    csv.row({lab.part, std::to_string(a.variant), std::to_string(lab.scale), std::to_string(lab.shear),
             std::to_string(lab.cone), std::to_string(a.translation[0]), std::to_string(a.translation[1]),
             format_double(sys.det(a.matrix)), format_double(norms[i])});
  }
  return csv.str();
}

}  // namespace sparsenet

#endif  // SPARSENET_AFFINE_SYSTEM_HPP
