#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dstab/numerics.hpp"
#include "test_support.hpp"

namespace dstab {
namespace {

using testing::random_matrix;

TEST(KronTest, Examples) {
  RealMatrix a(2, 2);
  a << 1, 2, 3, 4;
  const RealMatrix i2 = RealMatrix::Identity(2, 2);
  RealMatrix expected(4, 4);
  expected << 1, 0, 2, 0,
              0, 1, 0, 2,
              3, 0, 4, 0,
              0, 3, 0, 4;
  EXPECT_TRUE(kron(a, i2).isApprox(expected));

  RealMatrix row(1, 2);
  row << 1, -1;
  RealMatrix col(2, 1);
  col << 2, 3;
  RealMatrix expected2(2, 2);
  expected2 << 2, -2, 3, -3;
  EXPECT_TRUE(kron(row, col).isApprox(expected2));

  EXPECT_DOUBLE_EQ(kron(RealMatrix::Constant(1, 1, 3), RealMatrix::Constant(1, 1, -2))(0, 0), -6);
}

TEST(KronTest, MixedProductProperty) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const RealMatrix a = random_matrix(rng, 2, 3);
    const RealMatrix b = random_matrix(rng, 3, 2);
    const RealMatrix c = random_matrix(rng, 3, 2);
    const RealMatrix d = random_matrix(rng, 2, 3);
    const RealMatrix lhs = kron(a, b) * kron(c, d);
    const RealMatrix rhs = kron(a * c, b * d);
    EXPECT_LT((lhs - rhs).norm(), 1e-12 * (1 + rhs.norm()));
    EXPECT_TRUE(kron(a, b).transpose().isApprox(kron(a.transpose(), b.transpose())));
  }
}

TEST(NullspaceTest, Examples) {
  RealMatrix a(1, 2);
  a << 1, 1;
  RealMatrix n = nullspace_basis(a);
  ASSERT_EQ(n.cols(), 1);
  EXPECT_NEAR(std::abs(n(0, 0)), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(n(0, 0), -n(1, 0), 1e-12);

  a << -1, 1;
  n = nullspace_basis(a);
  ASSERT_EQ(n.cols(), 1);
  EXPECT_NEAR(n(0, 0), n(1, 0), 1e-12);

  n = nullspace_basis(RealMatrix::Zero(1, 2));
  EXPECT_EQ(n.cols(), 2);
  EXPECT_TRUE((n.transpose() * n).isApprox(RealMatrix::Identity(2, 2)));

  EXPECT_EQ(nullspace_basis(RealMatrix::Identity(3, 3)).cols(), 0);
}

TEST(NullspaceTest, Errors) {
  EXPECT_THROW(nullspace_basis(RealMatrix(2, 0)), std::invalid_argument);
  EXPECT_THROW(nullspace_basis(RealMatrix::Identity(2, 2), 0.0), std::invalid_argument);
}

TEST(NullspaceTest, OrthonormalAnnihilatingProperty) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 4);
    const int cols = rows + 1 + static_cast<int>(rng() % 4);
    const int rank = 1 + static_cast<int>(rng() % rows);
    const RealMatrix a = random_matrix(rng, rows, rank) * random_matrix(rng, rank, cols);
    const RealMatrix n = nullspace_basis(a);
    EXPECT_EQ(n.cols(), cols - rank);
    EXPECT_LT((n.transpose() * n - RealMatrix::Identity(n.cols(), n.cols())).norm(), 1e-10);
    EXPECT_LT((a * n).norm(), 1e-10 * (1 + a.norm()));
  }
}

TEST(SymmetricEigenTest, Examples) {
  RealMatrix h(2, 2);
  h << 2, 1, 1, 2;
  const SymmetricEigen e = symmetric_eigen(h);
  EXPECT_NEAR(e.values(0), 1, 1e-12);
  EXPECT_NEAR(e.values(1), 3, 1e-12);
  EXPECT_NEAR(lambda_min(h), 1, 1e-12);
  EXPECT_NEAR(lambda_max(h), 3, 1e-12);

  RealMatrix d = RealMatrix::Zero(3, 3);
  d.diagonal() << -4, 0.5, 2;
  EXPECT_NEAR(lambda_min(d), -4, 1e-14);
  EXPECT_NEAR(lambda_max(d), 2, 1e-14);
}

TEST(SymmetricEigenTest, Errors) {
  EXPECT_THROW(symmetric_eigen(RealMatrix::Zero(2, 3)), std::invalid_argument);
  RealMatrix a(2, 2);
  a << 1, 2, 0, 1;
  EXPECT_THROW(symmetric_eigen(a), std::invalid_argument);
}

TEST(SymmetricEigenTest, ReconstructionProperty) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    RealMatrix h = random_matrix(rng, n, n);
    h = (h + h.transpose()).eval();
    const SymmetricEigen e = symmetric_eigen(h);
    const RealMatrix rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_LT((rebuilt - h).norm(), 1e-10 * (1 + h.norm()));
    for (int i = 1; i < n; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
  }
}

TEST(PolyRootsTest, Examples) {
  ComplexScalarList r = poly_roots(std::vector<double>{-1, 0, 1});
  ASSERT_EQ(r.size(), 2u);
  std::sort(r.begin(), r.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  EXPECT_NEAR(r[0].real(), -1, 1e-12);
  EXPECT_NEAR(r[1].real(), 1, 1e-12);

  r = poly_roots(std::vector<double>{-5, 2, 1});
  std::sort(r.begin(), r.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  EXPECT_NEAR(r[0].real(), -1 - std::sqrt(6.0), 1e-12);
  EXPECT_NEAR(r[1].real(), -1 + std::sqrt(6.0), 1e-12);
  EXPECT_NEAR(r[0].imag(), 0, 1e-12);

  r = poly_roots(std::vector<double>{1, 0, 1});
  ASSERT_EQ(r.size(), 2u);
  for (const Complex& z : r) EXPECT_NEAR(std::abs(z), 1, 1e-12);

  EXPECT_TRUE(poly_roots(std::vector<double>{3}).empty());
  // Trailing exact zeros are trimmed before the companion step.
  EXPECT_EQ(poly_roots(std::vector<double>{2, 1, 0}).size(), 1u);
}

TEST(PolyRootsTest, Errors) {
  EXPECT_THROW(poly_roots(std::vector<double>{0, 0}), std::invalid_argument);
  EXPECT_THROW(poly_roots(std::vector<double>{1, 1, 1e-14}), std::invalid_argument);
}

// Roots of a stable cubic agree with the Routh-Hurwitz criterion.
TEST(PolyRootsTest, CubicRouthAgreementProperty) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 6);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const bool routh_stable = a > 0 && b > 0 && c > 0 && a * b > c;
    if (std::abs(a * b - c) < 1e-3 || (std::min({a, b, c}) > -1e-3 && std::min({a, b, c}) < 1e-3)) {
      continue;
    }
    bool roots_stable = true;
    for (const Complex& z : poly_roots(std::vector<double>{c, b, a, 1})) {
      roots_stable = roots_stable && z.real() < 0;
    }
    EXPECT_EQ(roots_stable, routh_stable) << a << " " << b << " " << c;
  }
}

TEST(PolyRootsTest, RecoversKnownRootsProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int deg = 1 + static_cast<int>(rng() % 8);
    std::vector<double> roots;
    for (int k = 0; k < deg; ++k) roots.push_back(-4.0 + k + 0.3 * std::uniform_real_distribution<double>(0, 1)(rng));
    const std::vector<double> p = testing::poly_from_real_roots(roots);
    const ComplexScalarList found = poly_roots(p);
    ASSERT_EQ(found.size(), roots.size());
    for (double r : roots) {
      double best = 1e9;
      for (const Complex& z : found) best = std::min(best, std::abs(z - r));
      EXPECT_LT(best, 1e-6);
    }
    for (const Complex& z : found) EXPECT_LT(std::abs(poly_eval(p, z)), 1e-8);
  }
}

TEST(PolyEvalTest, Examples) {
  EXPECT_EQ(poly_eval(std::vector<double>{1, 2, 3}, Complex(2, 0)), Complex(17, 0));
  const Complex v = poly_eval(std::vector<double>{1, 0, 1}, Complex(0, 1));
  EXPECT_NEAR(std::abs(v), 0, 1e-15);
}

TEST(InterpolateTest, Examples) {
  std::vector<Complex> nodes{-1, 0, 1};
  std::vector<Complex> values{1, 0, 1};
  std::vector<double> c = interpolate_poly(nodes, values);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_NEAR(c[0], 0, 1e-12);
  EXPECT_NEAR(c[1], 0, 1e-12);
  EXPECT_NEAR(c[2], 1, 1e-12);

  c = interpolate_poly(std::vector<Complex>{0, 1}, std::vector<Complex>{1, 2});
  EXPECT_NEAR(c[0], 1, 1e-12);
  EXPECT_NEAR(c[1], 1, 1e-12);

  std::vector<Complex> roots5, fourth;
  for (int k = 0; k < 5; ++k) {
    roots5.push_back(std::polar(1.0, 2 * std::numbers::pi * k / 5));
    fourth.push_back(std::pow(roots5.back(), 4));
  }
  c = interpolate_poly(roots5, fourth);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(c[static_cast<std::size_t>(k)], 0, 1e-12);
  EXPECT_NEAR(c[4], 1, 1e-12);
}

TEST(InterpolateTest, Errors) {
  EXPECT_THROW(interpolate_poly(std::vector<Complex>{1, 1}, std::vector<Complex>{0, 1}),
               std::invalid_argument);
  EXPECT_THROW(interpolate_poly(std::vector<Complex>{0, 1}, std::vector<Complex>{0}),
               std::invalid_argument);
  EXPECT_THROW(interpolate_poly(std::vector<Complex>{0, 1},
                                std::vector<Complex>{Complex(0, 1), Complex(0, 1)}),
               std::domain_error);
}

}  // namespace
}  // namespace dstab
