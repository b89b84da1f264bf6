#pragma once

// Dense linear algebra kernels shared by the rest of the library: Kronecker
// products, SVD null spaces, symmetric eigendecomposition, polynomial roots
// and complex interpolation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dstab {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;
using ComplexScalarList = std::vector<Complex>;

/// Rank threshold (relative to the largest singular value) used when a null
/// space is needed for a polynomial coefficient matrix.
inline constexpr double kDefaultNullspaceTol = 1e-10;

/// Kronecker product; block (i, j) of the result is a(i, j) * b.
inline RealMatrix kron(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Orthonormal basis of the right null space of `a`.
///
/// Singular values below tol * sigma_max count as zero, so the returned
/// column count is cols - numerical_rank. A zero matrix yields the identity.
inline RealMatrix nullspace_basis(const RealMatrix& a,
                                  double tol = kDefaultNullspaceTol) {
  if (a.cols() == 0) {
    throw std::invalid_argument("nullspace_basis: matrix has zero columns");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("nullspace_basis: tol must be positive");
  }
  if (a.rows() == 0) {
    return RealMatrix::Identity(a.cols(), a.cols());
  }
  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeFullV);
  const RealVector& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  Eigen::Index rank = 0;
  if (sigma_max > 0.0) {
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (sigma(i) >= tol * sigma_max) ++rank;
    }
  }
  return svd.matrixV().rightCols(a.cols() - rank);
}

struct SymmetricEigen {
  RealVector values;   // ascending
  RealMatrix vectors;  // columns are orthonormal eigenvectors
};

/// Eigendecomposition of a real symmetric matrix. Rejects non-square input
/// and input that is asymmetric beyond 1e-12 * ||h||.
inline SymmetricEigen symmetric_eigen(const RealMatrix& h) {
  if (h.rows() != h.cols()) {
    throw std::invalid_argument("symmetric_eigen: matrix is not square");
  }
  const double norm = h.norm();
  const double asym = (h - h.transpose()).norm();
  if (asym > 1e-12 * std::max(norm, 1e-300) && asym > 0.0) {
    throw std::invalid_argument("symmetric_eigen: matrix is not symmetric");
  }
  if (h.rows() == 0) return {RealVector(), RealMatrix()};
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("symmetric_eigen: decomposition failed");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Largest eigenvalue of a symmetric matrix.
inline double lambda_max(const RealMatrix& h) {
  return symmetric_eigen(h).values.maxCoeff();
}

/// Smallest eigenvalue of a symmetric matrix.
inline double lambda_min(const RealMatrix& h) {
  return symmetric_eigen(h).values.minCoeff();
}

/// Evaluates an ascending-coefficient polynomial by Horner's rule.
inline Complex poly_eval(std::span<const double> coeffs, Complex s) {
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
  return acc;
}

/// Roots of the polynomial sum_k coeffs[k] s^k.
///
/// Exact trailing zeros are dropped first. The remaining leading coefficient
/// must exceed 1e-12 * max|coeff|. Roots come from the eigenvalues of the
/// companion matrix, followed by a Newton polish on the original
/// coefficients which is kept only when it lowers the residual.
inline ComplexScalarList poly_roots(std::span<const double> coeffs) {
  std::size_t len = coeffs.size();
  while (len > 0 && coeffs[len - 1] == 0.0) --len;
  if (len == 0) {
    throw std::invalid_argument("poly_roots: zero polynomial");
  }
  double cmax = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    if (!std::isfinite(coeffs[k])) {
      throw std::invalid_argument("poly_roots: non-finite coefficient");
    }
    cmax = std::max(cmax, std::abs(coeffs[k]));
  }
  const double lead = coeffs[len - 1];
  if (std::abs(lead) <= 1e-12 * cmax) {
    throw std::invalid_argument("poly_roots: vanishing leading coefficient");
  }
  const auto degree = static_cast<Eigen::Index>(len - 1);
  if (degree == 0) return {};

  RealMatrix companion = RealMatrix::Zero(degree, degree);
  for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < degree; ++i) {
    companion(i, degree - 1) = -coeffs[static_cast<std::size_t>(i)] / lead;
  }
  Eigen::EigenSolver<RealMatrix> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("poly_roots: companion eigenvalues did not converge");
  }

  std::vector<double> deriv(len - 1);
  for (std::size_t k = 1; k < len; ++k) deriv[k - 1] = coeffs[k] * static_cast<double>(k);
  const std::span<const double> p(coeffs.data(), len);

  ComplexScalarList roots;
  roots.reserve(static_cast<std::size_t>(degree));
  for (Eigen::Index i = 0; i < degree; ++i) {
    Complex r = es.eigenvalues()(i);
    double residual = std::abs(poly_eval(p, r));
    for (int it = 0; it < 3; ++it) {
      const Complex d = poly_eval(deriv, r);
      if (d == 0.0) break;
      const Complex candidate = r - poly_eval(p, r) / d;
      const double cand_res = std::abs(poly_eval(p, candidate));
      if (!(cand_res < residual)) break;
      r = candidate;
      residual = cand_res;
    }
    roots.push_back(r);
  }
  return roots;
}

/// Polynomial through (nodes[k], values[k]) returned as real ascending
/// coefficients. Imaginary parts of the node-normalized coefficients up to
/// 1e-8 * max|value| are discarded; larger ones mean the data did not come
/// from a real polynomial.
inline std::vector<double> interpolate_poly(std::span<const Complex> nodes,
                                            std::span<const Complex> values) {
  if (nodes.size() != values.size()) {
    throw std::invalid_argument("interpolate_poly: node/value count mismatch");
  }
  const auto count = static_cast<Eigen::Index>(nodes.size());
  if (count == 0) {
    throw std::invalid_argument("interpolate_poly: no nodes");
  }
  double node_scale = 0.0;
  for (const Complex& z : nodes) node_scale = std::max(node_scale, std::abs(z));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (std::abs(nodes[i] - nodes[j]) <= 1e-14 * std::max(node_scale, 1.0)) {
        throw std::invalid_argument("interpolate_poly: duplicate nodes");
      }
    }
  }
  // Solve in the normalized variable s / node_scale so that roots-of-unity
  // style node sets give a unitary Vandermonde system.
  const double rho = node_scale > 0.0 ? node_scale : 1.0;
  ComplexMatrix vander(count, count);
  Eigen::VectorXcd rhs(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Complex w = nodes[static_cast<std::size_t>(i)] / rho;
    Complex power = 1.0;
    for (Eigen::Index k = 0; k < count; ++k) {
      vander(i, k) = power;
      power *= w;
    }
    rhs(i) = values[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXcd normalized = vander.fullPivLu().solve(rhs);

  double value_scale = 0.0;
  for (const Complex& v : values) value_scale = std::max(value_scale, std::abs(v));
  std::vector<double> out(static_cast<std::size_t>(count));
  for (Eigen::Index k = 0; k < count; ++k) {
    if (std::abs(normalized(k).imag()) > 1e-8 * value_scale) {
      throw std::domain_error("interpolate_poly: interpolant has complex coefficients");
    }
    out[static_cast<std::size_t>(k)] = normalized(k).real() / std::pow(rho, static_cast<double>(k));
  }
  return out;
}

}  // namespace dstab
