#pragma once

// Affine matrix-inequality systems over symmetric-positive and free matrix
// blocks, and the assembly of the vertex conditions for multilinear and
// polytopic families.
//
// For a coefficient matrix C = (A_0, ..., A_l) of an n x n polynomial
// matrix, R = [I_{nl} 0; 0 I_{nl}] maps the stacked monomial vector of
// length (l+1)n onto [low part; shifted part] of length 2nl. The quadratic
// form R^T (B kron P) R is negative on the null space of C exactly when the
// determinant roots are certified inside the region given by B.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dstab/numerics.hpp"
#include "dstab/polymatrix.hpp"
#include "dstab/regions.hpp"

namespace dstab {

enum class BlockKind { kSymmetricPositive, kFree };

struct VariableBlock {
  std::string id;
  BlockKind kind = BlockKind::kFree;
  int rows = 0;
  int cols = 0;
};

/// left * X * right, plus its transpose when `symmetrize` is set.
struct ConstraintTerm {
  RealMatrix left;
  std::size_t block = 0;
  RealMatrix right;
  bool symmetrize = false;
};

enum class Sense { kNegativeDefinite, kPositiveDefinite };

/// constant + sum of terms, required to be strictly negative (or positive)
/// definite.
struct AffineConstraint {
  std::string label;
  int dim = 0;
  RealMatrix constant;
  std::vector<ConstraintTerm> terms;
  Sense sense = Sense::kNegativeDefinite;
};

/// Values for every block of a system, indexed like LmiSystem::blocks().
struct Assignment {
  std::vector<RealMatrix> values;
};

class LmiSystem {
 public:
  std::size_t add_block(std::string id, BlockKind kind, int rows, int cols) {
    if (rows < 1 || cols < 1) {
      throw std::invalid_argument("LmiSystem: block '" + id + "' has empty dims");
    }
    if (kind == BlockKind::kSymmetricPositive && rows != cols) {
      throw std::invalid_argument("LmiSystem: symmetric block '" + id + "' must be square");
    }
    for (const VariableBlock& b : blocks_) {
      if (b.id == id) throw std::invalid_argument("LmiSystem: duplicate block id '" + id + "'");
    }
    blocks_.push_back({std::move(id), kind, rows, cols});
    return blocks_.size() - 1;
  }

  void add_constraint(AffineConstraint c) {
    if (c.dim < 1 || c.constant.rows() != c.dim || c.constant.cols() != c.dim) {
      throw std::invalid_argument("LmiSystem: constraint '" + c.label + "' has bad constant dims");
    }
    if ((c.constant - c.constant.transpose()).norm() > 1e-12 * (1.0 + c.constant.norm())) {
      throw std::invalid_argument("LmiSystem: constraint '" + c.label + "' constant is not symmetric");
    }
    for (const ConstraintTerm& t : c.terms) {
      if (t.block >= blocks_.size()) {
        throw std::invalid_argument("LmiSystem: constraint '" + c.label + "' uses an undeclared block");
      }
      const VariableBlock& b = blocks_[t.block];
      if (t.left.rows() != c.dim || t.left.cols() != b.rows || t.right.rows() != b.cols ||
          t.right.cols() != c.dim) {
        throw std::invalid_argument("LmiSystem: constraint '" + c.label + "' term does not conform");
      }
    }
    constraints_.push_back(std::move(c));
  }

  const std::vector<VariableBlock>& blocks() const { return blocks_; }
  const std::vector<AffineConstraint>& constraints() const { return constraints_; }

  std::optional<std::size_t> find_block(const std::string& id) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (blocks_[i].id == id) return i;
    }
    return std::nullopt;
  }

  /// Strict LMIs in the problem: every constraint plus one positivity
  /// condition per symmetric-positive block.
  std::size_t lmi_count() const {
    std::size_t count = constraints_.size();
    for (const VariableBlock& b : blocks_) {
      if (b.kind == BlockKind::kSymmetricPositive) ++count;
    }
    return count;
  }

  void set_r_matrix(RealMatrix r) { r_matrix_ = std::move(r); }
  const RealMatrix& r_matrix() const { return r_matrix_; }

  /// Value of a constraint's matrix under an assignment.
  RealMatrix evaluate(const AffineConstraint& c, const Assignment& a) const {
    if (a.values.size() != blocks_.size()) {
      throw std::invalid_argument("LmiSystem: assignment does not cover every block");
    }
    RealMatrix m = c.constant;
    for (const ConstraintTerm& t : c.terms) {
      const RealMatrix& x = a.values[t.block];
      const VariableBlock& b = blocks_[t.block];
      if (x.rows() != b.rows || x.cols() != b.cols) {
        throw std::invalid_argument("LmiSystem: assignment for '" + b.id + "' has wrong dims");
      }
      const RealMatrix prod = t.left * x * t.right;
      m += prod;
      if (t.symmetrize) m += prod.transpose();
    }
    return m;
  }

 private:
  std::vector<VariableBlock> blocks_;
  std::vector<AffineConstraint> constraints_;
  RealMatrix r_matrix_;
};

/// The 2nl x (l+1)n selector [I_{nl} 0; 0 I_{nl}].
inline RealMatrix build_r(int n, int l) {
  if (n < 1) throw std::invalid_argument("build_r: n must be positive");
  if (l < 1) throw std::invalid_argument("build_r: degree must be at least 1");
  const int nl = n * l;
  RealMatrix r = RealMatrix::Zero(2 * nl, (l + 1) * n);
  r.topLeftCorner(nl, nl).setIdentity();
  r.bottomRightCorner(nl, nl).setIdentity();
  return r;
}

namespace internal {

// Adds outer^T * R^T (B kron P) R * outer as at most three terms in P, where
// `outer` maps the constraint space into the (l+1)n monomial space.
inline void add_region_terms(AffineConstraint& c, std::size_t p_block, const RealMatrix& r,
                             const LmiRegion& region, const RealMatrix& outer, int nl) {
  const RealMatrix top = r.topRows(nl) * outer;
  const RealMatrix bottom = r.bottomRows(nl) * outer;
  const Eigen::Matrix2d& b = region.b();
  if (b(0, 0) != 0.0) c.terms.push_back({b(0, 0) * top.transpose(), p_block, top, false});
  if (b(1, 1) != 0.0) c.terms.push_back({b(1, 1) * bottom.transpose(), p_block, bottom, false});
  if (b(0, 1) != 0.0) c.terms.push_back({b(0, 1) * top.transpose(), p_block, bottom, true});
}

inline void check_vertex_dims(const std::vector<CoefficientMatrix>& cms) {
  if (cms.empty()) throw std::invalid_argument("assemble: no vertex coefficient matrices");
  for (const CoefficientMatrix& cm : cms) {
    if (cm.n != cms.front().n || cm.degree != cms.front().degree ||
        cm.data.rows() != cm.n || cm.data.cols() != static_cast<Eigen::Index>(cm.n) * (cm.degree + 1)) {
      throw std::invalid_argument("assemble: vertex coefficient matrices differ in dims");
    }
  }
}

}  // namespace internal

/// Single-matrix test: N^T R^T (B kron P) R N < 0 with P > 0, N a null-space
/// basis of the coefficient matrix.
inline LmiSystem assemble_single_matrix(const CoefficientMatrix& ca, const LmiRegion& region) {
  const int n = ca.n;
  const int l = ca.degree;
  const RealMatrix r = build_r(n, l);
  const RealMatrix null = nullspace_basis(ca.data);
  if (null.cols() == 0) {
    throw std::invalid_argument("assemble_single_matrix: coefficient matrix has full column rank");
  }
  LmiSystem sys;
  sys.set_r_matrix(r);
  const std::size_t p = sys.add_block("P", BlockKind::kSymmetricPositive, n * l, n * l);
  AffineConstraint c;
  c.label = "region";
  c.dim = static_cast<int>(null.cols());
  c.constant = RealMatrix::Zero(c.dim, c.dim);
  internal::add_region_terms(c, p, r, region, null, n * l);
  sys.add_constraint(std::move(c));
  return sys;
}

struct VertexLmiOptions {
  /// One P for all vertices instead of one per vertex.
  bool shared_p = false;
};

/// Vertex conditions R^T (B kron P_i) R + C_i^T Q^T R + R^T Q C_i < 0, one per
/// vertex coefficient matrix C_i, with P_i > 0 and a single free Q of size
/// 2nl x n shared by all vertices.
inline LmiSystem assemble_vertex_system(const std::vector<CoefficientMatrix>& vertex_cms,
                                        const LmiRegion& region, VertexLmiOptions opts = {}) {
  internal::check_vertex_dims(vertex_cms);
  const int n = vertex_cms.front().n;
  const int l = vertex_cms.front().degree;
  const int nl = n * l;
  const int dim = (l + 1) * n;
  const RealMatrix r = build_r(n, l);
  const RealMatrix identity = RealMatrix::Identity(dim, dim);

  LmiSystem sys;
  sys.set_r_matrix(r);
  std::vector<std::size_t> p_blocks;
  if (opts.shared_p) {
    p_blocks.push_back(sys.add_block("P", BlockKind::kSymmetricPositive, nl, nl));
  } else {
    for (std::size_t i = 0; i < vertex_cms.size(); ++i) {
      p_blocks.push_back(
          sys.add_block("P" + std::to_string(i + 1), BlockKind::kSymmetricPositive, nl, nl));
    }
  }
  const std::size_t q = sys.add_block("Q", BlockKind::kFree, 2 * nl, n);

  for (std::size_t i = 0; i < vertex_cms.size(); ++i) {
    AffineConstraint c;
    c.label = "vertex " + std::to_string(i + 1);
    c.dim = dim;
    c.constant = RealMatrix::Zero(dim, dim);
    internal::add_region_terms(c, opts.shared_p ? p_blocks.front() : p_blocks[i], r, region,
                               identity, nl);
    c.terms.push_back({r.transpose(), q, vertex_cms[i].data, true});
    sys.add_constraint(std::move(c));
  }
  return sys;
}

/// Multilinear family: vertex_cms are the 2^m corner members.
inline LmiSystem assemble_multilinear(const std::vector<CoefficientMatrix>& vertex_cms,
                                   const LmiRegion& region, VertexLmiOptions opts = {}) {
  return assemble_vertex_system(vertex_cms, region, opts);
}

/// Polytopic family: vertex_cms are the members with every entry on a vertex
/// polynomial.
inline LmiSystem assemble_polytopic(const std::vector<CoefficientMatrix>& vertex_cms,
                                   const LmiRegion& region, VertexLmiOptions opts = {}) {
  return assemble_vertex_system(vertex_cms, region, opts);
}

}  // namespace dstab
