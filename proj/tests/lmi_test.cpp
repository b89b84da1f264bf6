#include <cmath>
#include <random>
#include <variant>
#include <vector>

#include <gtest/gtest.h>

#include "dstab/lmi.hpp"
#include "dstab/problem.hpp"
#include "test_support.hpp"

namespace dstab {
namespace {

using testing::scalar_poly;

Assignment scalar_p(double p) { return Assignment{{RealMatrix::Constant(1, 1, p)}}; }

TEST(BuildRTest, Examples) {
  RealMatrix expected(2, 2);
  expected.setIdentity();
  EXPECT_EQ(build_r(1, 1), expected);

  const RealMatrix r = build_r(1, 3);
  RealMatrix expected3(6, 4);
  expected3 << 1, 0, 0, 0,
               0, 1, 0, 0,
               0, 0, 1, 0,
               0, 1, 0, 0,
               0, 0, 1, 0,
               0, 0, 0, 1;
  EXPECT_EQ(r, expected3);
  EXPECT_EQ(build_r(3, 3).rows(), 18);
  EXPECT_EQ(build_r(3, 3).cols(), 12);
  EXPECT_THROW(build_r(1, 0), std::invalid_argument);
  EXPECT_THROW(build_r(0, 1), std::invalid_argument);
}

TEST(BuildRTest, GramDiagonalProperty) {
  for (int n = 1; n <= 3; ++n) {
    for (int l = 1; l <= 4; ++l) {
      const RealMatrix g = build_r(n, l).transpose() * build_r(n, l);
      for (int i = 0; i < g.rows(); ++i) {
        const bool end_block = i < n || i >= l * n;
        EXPECT_EQ(g(i, i), end_block ? 1.0 : 2.0);
      }
      EXPECT_TRUE(g.isApprox(g.transpose()));
    }
  }
}

TEST(SingleMatrixTest, ScalarExamples) {
  const LmiSystem stable = assemble_single_matrix(coefficient_matrix(scalar_poly({1, 1})), LmiRegion::lhp());
  ASSERT_EQ(stable.constraints().size(), 1u);
  EXPECT_EQ(stable.lmi_count(), 2u);
  for (double p : {0.5, 1.0, 3.0}) {
    EXPECT_NEAR(stable.evaluate(stable.constraints()[0], scalar_p(p))(0, 0), -p, 1e-12);
  }
  const LmiSystem unstable = assemble_single_matrix(coefficient_matrix(scalar_poly({-1, 1})), LmiRegion::lhp());
  EXPECT_NEAR(unstable.evaluate(unstable.constraints()[0], scalar_p(2))(0, 0), 2, 1e-12);

  // s - 0.5 in the disk: unit null vector (1, 0.5)/|.| gives (-1 + 0.25)/1.25.
  const LmiSystem disk = assemble_single_matrix(coefficient_matrix(scalar_poly({-0.5, 1})), LmiRegion::unit_disk());
  EXPECT_NEAR(disk.evaluate(disk.constraints()[0], scalar_p(1))(0, 0), -0.6, 1e-12);
}

TEST(VertexSystemTest, Example1Dims) {
  const ProblemFile pf = load_problem(testing::problem_path("example1.json"));
  const auto cms = testing::vertex_cms(std::get<MultilinearFamily>(pf.family));
  const LmiSystem sys = assemble_multilinear(cms, pf.region);
  ASSERT_EQ(sys.constraints().size(), 8u);
  for (const AffineConstraint& c : sys.constraints()) EXPECT_EQ(c.dim, 4);
  ASSERT_EQ(sys.blocks().size(), 9u);
  EXPECT_EQ(sys.blocks()[0].rows, 3);
  EXPECT_EQ(sys.blocks()[0].kind, BlockKind::kSymmetricPositive);
  const std::size_t q = *sys.find_block("Q");
  EXPECT_EQ(sys.blocks()[q].rows, 6);
  EXPECT_EQ(sys.blocks()[q].cols, 1);
  EXPECT_EQ(sys.blocks()[q].kind, BlockKind::kFree);
  EXPECT_EQ(sys.lmi_count(), 16u);

  const LmiSystem shared = assemble_multilinear(cms, pf.region, {true});
  EXPECT_EQ(shared.blocks().size(), 2u);
  EXPECT_EQ(shared.lmi_count(), 9u);
}

TEST(VertexSystemTest, Example2Dims) {
  const ProblemFile pf = load_problem(testing::problem_path("example2.json"));
  const auto cms = testing::vertex_cms(std::get<MultilinearFamily>(pf.family));
  const LmiSystem sys = assemble_multilinear(cms, pf.region);
  ASSERT_EQ(sys.constraints().size(), 8u);
  EXPECT_EQ(sys.constraints()[0].dim, 12);
  EXPECT_EQ(sys.blocks()[0].rows, 9);
  const std::size_t q = *sys.find_block("Q");
  EXPECT_EQ(sys.blocks()[q].rows, 18);
  EXPECT_EQ(sys.blocks()[q].cols, 3);
}

TEST(VertexSystemTest, PolytopicDims) {
  const PolytopicFamily f(1, 1, {{Polynomial({1, 1}), Polynomial({2, 1})}});
  const LmiSystem sys = assemble_polytopic(testing::vertex_cms(f), LmiRegion::lhp());
  EXPECT_EQ(sys.constraints().size(), 2u);
  EXPECT_EQ(sys.lmi_count(), 4u);
}

Assignment random_assignment(const LmiSystem& sys, std::mt19937_64& rng) {
  Assignment a;
  for (const VariableBlock& b : sys.blocks()) {
    RealMatrix x = testing::random_matrix(rng, b.rows, b.cols);
    if (b.kind == BlockKind::kSymmetricPositive) x = (x * x.transpose()).eval();
    a.values.push_back(x);
  }
  return a;
}

TEST(VertexSystemTest, ConstraintsAreSymmetricProperty) {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 50; ++trial) {
    const LmiRegion region = trial % 2 ? LmiRegion::lhp() : LmiRegion::unit_disk();
    const MultilinearFamily f = testing::random_family(rng, 2, 2, 1 + trial % 3, 1 + trial % 2);
    const LmiSystem sys = assemble_multilinear(testing::vertex_cms(f), region);
    const Assignment a = random_assignment(sys, rng);
    for (const AffineConstraint& c : sys.constraints()) {
      const RealMatrix m = sys.evaluate(c, a);
      EXPECT_LT((m - m.transpose()).norm(), 1e-12 * (1 + m.norm()));
    }
  }
}

// On the null space of C the Q terms vanish, so the vertex condition
// projects onto the single-matrix condition for any Q.
TEST(VertexSystemTest, ProjectsOntoSingleMatrixProperty) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const LmiRegion region = trial % 2 ? LmiRegion::lhp() : LmiRegion::unit_disk();
    const int n = 1 + trial % 3;
    const int l = 1 + (trial / 3) % 3;
    std::vector<RealMatrix> blocks;
    for (int k = 0; k <= l; ++k) blocks.push_back(testing::random_matrix(rng, n, n));
    const CoefficientMatrix cm = coefficient_matrix(PolynomialMatrix(blocks));
    const LmiSystem vertex = assemble_vertex_system({cm}, region);
    const LmiSystem single = assemble_single_matrix(cm, region);
    const Assignment a = random_assignment(vertex, rng);
    const RealMatrix null = nullspace_basis(cm.data);
    const RealMatrix projected = null.transpose() * vertex.evaluate(vertex.constraints()[0], a) * null;
    const RealMatrix direct = single.evaluate(single.constraints()[0], Assignment{{a.values[0]}});
    EXPECT_LT((projected - direct).norm(), 1e-10 * (1 + direct.norm()));
  }
}

TEST(LmiSystemTest, RejectsMalformedInput) {
  LmiSystem sys;
  const std::size_t p = sys.add_block("P", BlockKind::kSymmetricPositive, 2, 2);
  EXPECT_THROW(sys.add_block("P", BlockKind::kFree, 1, 1), std::invalid_argument);
  EXPECT_THROW(sys.add_block("S", BlockKind::kSymmetricPositive, 2, 3), std::invalid_argument);

  AffineConstraint bad_dims{"c", 2, RealMatrix::Zero(3, 3), {}, Sense::kNegativeDefinite};
  EXPECT_THROW(sys.add_constraint(bad_dims), std::invalid_argument);

  RealMatrix asym = RealMatrix::Zero(2, 2);
  asym(0, 1) = 1;
  EXPECT_THROW(sys.add_constraint({"c", 2, asym, {}, Sense::kNegativeDefinite}), std::invalid_argument);

  AffineConstraint undeclared{"c", 2, RealMatrix::Zero(2, 2), {}, Sense::kNegativeDefinite};
  undeclared.terms.push_back({RealMatrix::Identity(2, 2), 5, RealMatrix::Identity(2, 2), false});
  EXPECT_THROW(sys.add_constraint(undeclared), std::invalid_argument);

  AffineConstraint nonconforming{"c", 2, RealMatrix::Zero(2, 2), {}, Sense::kNegativeDefinite};
  nonconforming.terms.push_back({RealMatrix::Identity(2, 3), p, RealMatrix::Identity(2, 2), false});
  EXPECT_THROW(sys.add_constraint(nonconforming), std::invalid_argument);

  EXPECT_THROW(assemble_vertex_system({}, LmiRegion::lhp()), std::invalid_argument);
  const CoefficientMatrix a = coefficient_matrix(scalar_poly({1, 1}));
  const CoefficientMatrix b = coefficient_matrix(scalar_poly({1, 1, 1}));
  EXPECT_THROW(assemble_vertex_system({a, b}, LmiRegion::lhp()), std::invalid_argument);
}

}  // namespace
}  // namespace dstab
