#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dstab/numerics.hpp"

namespace dstab {

/// Scalar polynomial with ascending coefficients (coeffs[k] multiplies s^k).
struct Polynomial {
  std::vector<double> coeffs{0.0};

  Polynomial() = default;
  explicit Polynomial(std::vector<double> c) : coeffs(std::move(c)) {
    if (coeffs.empty()) {
      throw std::invalid_argument("Polynomial: coefficient list is empty");
    }
    for (double v : coeffs) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("Polynomial: non-finite coefficient");
      }
    }
  }

  /// Index of the highest nonzero coefficient (0 for the zero polynomial).
  int degree() const {
    for (std::size_t k = coeffs.size(); k-- > 0;) {
      if (coeffs[k] != 0.0) return static_cast<int>(k);
    }
    return 0;
  }

  Complex operator()(Complex s) const { return poly_eval(coeffs, s); }

  /// Copy padded with zeros (or checked-truncated) to exactly `length` terms.
  Polynomial padded(std::size_t length) const {
    std::vector<double> c = coeffs;
    if (c.size() > length) {
      for (std::size_t k = length; k < c.size(); ++k) {
        if (c[k] != 0.0) {
          throw std::invalid_argument("Polynomial: degree exceeds target length");
        }
      }
    }
    c.resize(length, 0.0);
    return Polynomial(std::move(c));
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;
};

/// Horizontal concatenation (A_0, ..., A_l) of the blocks of a polynomial
/// matrix; always n x (l+1)n.
struct CoefficientMatrix {
  int n = 0;
  int degree = 0;
  RealMatrix data;
};

/// n x n polynomial matrix A_0 + A_1 s + ... + A_l s^l stored as its degree
/// blocks. The degree is stored, so zero high-order blocks are allowed.
class PolynomialMatrix {
 public:
  PolynomialMatrix() = default;

  explicit PolynomialMatrix(std::vector<RealMatrix> blocks)
      : blocks_(std::move(blocks)) {
    if (blocks_.empty()) {
      throw std::invalid_argument("PolynomialMatrix: needs at least one block");
    }
    const auto n = blocks_.front().rows();
    for (const RealMatrix& b : blocks_) {
      if (b.rows() != n || b.cols() != n) {
        throw std::invalid_argument("PolynomialMatrix: blocks must all be n x n");
      }
      if (!b.allFinite()) {
        throw std::invalid_argument("PolynomialMatrix: non-finite entry");
      }
    }
  }

  /// Builds from an n x n grid of entry polynomials, row-major; every entry
  /// is padded to `degree`.
  static PolynomialMatrix from_entries(int n, int degree,
                                       const std::vector<Polynomial>& entries) {
    if (n < 1 || degree < 0 || entries.size() != static_cast<std::size_t>(n * n)) {
      throw std::invalid_argument("PolynomialMatrix::from_entries: bad shape");
    }
    std::vector<RealMatrix> blocks(static_cast<std::size_t>(degree + 1),
                                   RealMatrix::Zero(n, n));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Polynomial p =
            entries[static_cast<std::size_t>(i * n + j)].padded(
                static_cast<std::size_t>(degree + 1));
        for (int k = 0; k <= degree; ++k) {
          blocks[static_cast<std::size_t>(k)](i, j) = p.coeffs[static_cast<std::size_t>(k)];
        }
      }
    }
    return PolynomialMatrix(std::move(blocks));
  }

  static PolynomialMatrix from_coefficient_matrix(const CoefficientMatrix& cm) {
    if (cm.data.rows() != cm.n || cm.data.cols() != static_cast<Eigen::Index>(cm.n) * (cm.degree + 1)) {
      throw std::invalid_argument("from_coefficient_matrix: dims are not n x (l+1)n");
    }
    std::vector<RealMatrix> blocks;
    for (int k = 0; k <= cm.degree; ++k) {
      blocks.push_back(cm.data.middleCols(static_cast<Eigen::Index>(k) * cm.n, cm.n));
    }
    return PolynomialMatrix(std::move(blocks));
  }

  int size() const { return blocks_.empty() ? 0 : static_cast<int>(blocks_.front().rows()); }
  int degree() const { return static_cast<int>(blocks_.size()) - 1; }
  const RealMatrix& block(int k) const { return blocks_.at(static_cast<std::size_t>(k)); }
  const std::vector<RealMatrix>& blocks() const { return blocks_; }

  Polynomial entry(int i, int j) const {
    std::vector<double> c;
    for (const RealMatrix& b : blocks_) c.push_back(b(i, j));
    return Polynomial(std::move(c));
  }

  /// Same matrix with zero blocks appended up to `degree`.
  PolynomialMatrix padded(int degree) const {
    if (degree < this->degree()) {
      throw std::invalid_argument("PolynomialMatrix::padded: cannot lower the degree");
    }
    std::vector<RealMatrix> b = blocks_;
    b.resize(static_cast<std::size_t>(degree + 1), RealMatrix::Zero(size(), size()));
    return PolynomialMatrix(std::move(b));
  }

  bool operator==(const PolynomialMatrix& other) const {
    if (blocks_.size() != other.blocks_.size()) return false;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      if (blocks_[k] != other.blocks_[k]) return false;
    }
    return true;
  }

 private:
  std::vector<RealMatrix> blocks_;
};

inline CoefficientMatrix coefficient_matrix(const PolynomialMatrix& p) {
  const int n = p.size();
  CoefficientMatrix cm{n, p.degree(), RealMatrix(n, static_cast<Eigen::Index>(n) * (p.degree() + 1))};
  for (int k = 0; k <= p.degree(); ++k) {
    cm.data.middleCols(static_cast<Eigen::Index>(k) * n, n) = p.block(k);
  }
  return cm;
}

/// Horner evaluation of p at a complex point.
inline ComplexMatrix eval_at(const PolynomialMatrix& p, Complex s0) {
  ComplexMatrix acc = ComplexMatrix::Zero(p.size(), p.size());
  for (int k = p.degree(); k >= 0; --k) {
    acc = acc * s0 + p.block(k).cast<Complex>();
  }
  return acc;
}

inline constexpr int kMaxDeterminantDegree = 511;

/// Determinant polynomial of p, degree at most n*l.
///
/// det(p(z)) is sampled at n*l+1 scaled roots of unity and interpolated. The
/// radius is (|det A_0| / |det A_l|)^(1/(n*l)) clamped to [1/b, b] with b one
/// plus the largest block row-sum norm (1 when either determinant vanishes); leading coefficients below
/// 1e-9 * max|coeff| are trimmed.
inline Polynomial det_poly(const PolynomialMatrix& p) {
  const int n = p.size();
  const int max_degree = n * p.degree();
  if (max_degree > kMaxDeterminantDegree) {
    throw std::invalid_argument("det_poly: n*l exceeds the supported size");
  }
  double row_sum = 0.0;
  for (const RealMatrix& b : p.blocks()) {
    row_sum = std::max(row_sum, b.cwiseAbs().rowwise().sum().maxCoeff());
  }
  // Geometric mean of the root moduli balances the coefficient magnitudes
  // at the nodes; the row-sum bound keeps it in a sane range.
  const double bound = 1.0 + row_sum;
  double radius = 1.0;
  if (max_degree > 0) {
    const double low = std::abs(p.block(0).partialPivLu().determinant());
    const double high = std::abs(p.block(p.degree()).partialPivLu().determinant());
    if (low > 0.0 && high > 0.0 && std::isfinite(low / high)) {
      radius = std::clamp(std::pow(low / high, 1.0 / max_degree), 1.0 / bound, bound);
    }
  }
  const int count = max_degree + 1;
  std::vector<Complex> nodes(static_cast<std::size_t>(count));
  std::vector<Complex> values(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / count;
    nodes[static_cast<std::size_t>(k)] = std::polar(radius, angle);
    values[static_cast<std::size_t>(k)] =
        eval_at(p, nodes[static_cast<std::size_t>(k)]).partialPivLu().determinant();
  }
  std::vector<double> coeffs = interpolate_poly(nodes, values);
  double cmax = 0.0;
  for (double c : coeffs) cmax = std::max(cmax, std::abs(c));
  while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-9 * cmax) coeffs.pop_back();
  if (cmax == 0.0) coeffs.assign(1, 0.0);
  return Polynomial(std::move(coeffs));
}

/// Weighted blockwise sum; summands are zero-padded to the largest degree.
inline PolynomialMatrix scale_add(
    const std::vector<std::pair<double, PolynomialMatrix>>& terms) {
  if (terms.empty()) {
    throw std::invalid_argument("scale_add: no summands");
  }
  const int n = terms.front().second.size();
  int degree = 0;
  for (const auto& [w, p] : terms) {
    if (p.size() != n) {
      throw std::invalid_argument("scale_add: summands differ in dimension");
    }
    degree = std::max(degree, p.degree());
  }
  std::vector<RealMatrix> blocks(static_cast<std::size_t>(degree + 1), RealMatrix::Zero(n, n));
  for (const auto& [w, p] : terms) {
    for (int k = 0; k <= p.degree(); ++k) blocks[static_cast<std::size_t>(k)] += w * p.block(k);
  }
  return PolynomialMatrix(std::move(blocks));
}

}  // namespace dstab
