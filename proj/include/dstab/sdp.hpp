#pragma once

// Strict LMI feasibility by maximizing a uniform margin t:
//
//   maximize t  s.t.  M_c(x) <= -t I   (negative-definite constraints)
//                     M_c(x) >=  t I   (positive-definite constraints)
//                     P_k(x) >=  t I   (symmetric-positive blocks)
//                     |x| <= 1
//
// where x stacks the upper triangles of the symmetric blocks and all entries
// of the free blocks. Every constraint family of interest is homogeneous in
// x, so the unit ball only fixes the scale. The problem is solved with a
// log-barrier path-following method; starting from x = 0 with t low enough
// makes the start strictly feasible, so no phase-one step is required.
//
// A returned Feasible status is always re-verified by residual_check(),
// which evaluates each constraint from the assignment with an eigenvalue
// solver and does not reuse any solver state.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dstab/lmi.hpp"
#include "dstab/numerics.hpp"

namespace dstab {

struct SolveOptions {
  double margin_tol = 1e-7;
  int max_iter = 500;
  /// Accepted for interface stability; the current solver draws no random
  /// numbers, so results are identical for every seed.
  std::uint64_t seed = 0;
};

enum class SolveStatus { kFeasible, kUndetermined };

inline const char* to_string(SolveStatus s) {
  return s == SolveStatus::kFeasible ? "feasible" : "undetermined";
}

struct SolveReport {
  SolveStatus status = SolveStatus::kUndetermined;
  /// Achieved t at the last iterate.
  double margin = -std::numeric_limits<double>::infinity();
  /// Upper bound on the optimal t implied by the barrier duality gap.
  double margin_upper_bound = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  /// Present iff status == kFeasible.
  std::optional<Assignment> assignment;
  /// residual_check() of the final iterate, in residual_check() order.
  std::vector<double> residual_margins;
  std::string note;
};

/// Verified slack of every strict inequality under an assignment: one entry
/// per constraint (-lambda_max for negative-definite, lambda_min for
/// positive-definite), then lambda_min of each symmetric-positive block in
/// declaration order.
inline std::vector<double> residual_check(const LmiSystem& sys, const Assignment& a) {
  if (a.values.size() != sys.blocks().size()) {
    throw std::invalid_argument("residual_check: assignment is missing blocks");
  }
  std::vector<double> out;
  for (const AffineConstraint& c : sys.constraints()) {
    RealMatrix m = sys.evaluate(c, a);
    m = 0.5 * (m + m.transpose());
    out.push_back(c.sense == Sense::kNegativeDefinite ? -lambda_max(m) : lambda_min(m));
  }
  for (std::size_t k = 0; k < sys.blocks().size(); ++k) {
    if (sys.blocks()[k].kind != BlockKind::kSymmetricPositive) continue;
    const RealMatrix& p = a.values[k];
    out.push_back(lambda_min(0.5 * (p + p.transpose())));
  }
  return out;
}

namespace internal {

// Scalar parameterization of the decision blocks.
class BlockLayout {
 public:
  explicit BlockLayout(const LmiSystem& sys) {
    for (const VariableBlock& b : sys.blocks()) {
      offsets_.push_back(count_);
      count_ += b.kind == BlockKind::kSymmetricPositive
                    ? static_cast<std::size_t>(b.rows * (b.rows + 1) / 2)
                    : static_cast<std::size_t>(b.rows * b.cols);
    }
    blocks_ = sys.blocks();
  }

  std::size_t count() const { return count_; }
  std::size_t offset(std::size_t block) const { return offsets_[block]; }

  // Calls fn(param_index, i, j) for each scalar of the block; for symmetric
  // blocks (i, j) is an upper-triangle position.
  template <typename Fn>
  void for_each_param(std::size_t block, Fn&& fn) const {
    const VariableBlock& b = blocks_[block];
    std::size_t idx = offsets_[block];
    if (b.kind == BlockKind::kSymmetricPositive) {
      for (int i = 0; i < b.rows; ++i) {
        for (int j = i; j < b.rows; ++j) fn(idx++, i, j);
      }
    } else {
      for (int i = 0; i < b.rows; ++i) {
        for (int j = 0; j < b.cols; ++j) fn(idx++, i, j);
      }
    }
  }

  Assignment to_assignment(const RealVector& x) const {
    Assignment a;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const VariableBlock& b = blocks_[k];
      RealMatrix m = RealMatrix::Zero(b.rows, b.cols);
      const bool sym = b.kind == BlockKind::kSymmetricPositive;
      for_each_param(k, [&](std::size_t v, int i, int j) {
        m(i, j) = x(static_cast<Eigen::Index>(v));
        if (sym) m(j, i) = x(static_cast<Eigen::Index>(v));
      });
      a.values.push_back(std::move(m));
    }
    return a;
  }

 private:
  std::vector<VariableBlock> blocks_;
  std::vector<std::size_t> offsets_;
  std::size_t count_ = 0;
};

// G(z) = g0 + sum_v z_v G_v, required positive definite.
struct BarrierLmi {
  RealMatrix g0;
  std::vector<Eigen::Index> vars;
  std::vector<RealMatrix> mats;
};

inline BarrierLmi make_constraint_lmi(const LmiSystem& sys, const BlockLayout& layout,
                                      const AffineConstraint& c, Eigen::Index t_index) {
  const double sign = c.sense == Sense::kNegativeDefinite ? -1.0 : 1.0;
  std::map<Eigen::Index, RealMatrix> acc;
  for (const ConstraintTerm& term : c.terms) {
    const bool sym = sys.blocks()[term.block].kind == BlockKind::kSymmetricPositive;
    layout.for_each_param(term.block, [&](std::size_t v, int i, int j) {
      RealMatrix d = term.left.col(i) * term.right.row(j);
      if (sym && i != j) d += term.left.col(j) * term.right.row(i);
      if (term.symmetrize) d += d.transpose().eval();
      auto [it, inserted] = acc.try_emplace(static_cast<Eigen::Index>(v), RealMatrix::Zero(c.dim, c.dim));
      it->second += sign * d;
    });
  }
  BarrierLmi out;
  out.g0 = sign * c.constant;
  for (auto& [v, m] : acc) {
    out.vars.push_back(v);
    out.mats.push_back(0.5 * (m + m.transpose()));
  }
  out.vars.push_back(t_index);
  out.mats.push_back(-RealMatrix::Identity(c.dim, c.dim));
  return out;
}

inline BarrierLmi make_block_lmi(const VariableBlock& b, const BlockLayout& layout,
                                 std::size_t block, Eigen::Index t_index) {
  BarrierLmi out;
  out.g0 = RealMatrix::Zero(b.rows, b.rows);
  layout.for_each_param(block, [&](std::size_t v, int i, int j) {
    RealMatrix e = RealMatrix::Zero(b.rows, b.rows);
    e(i, j) = 1.0;
    e(j, i) = 1.0;
    out.vars.push_back(static_cast<Eigen::Index>(v));
    out.mats.push_back(std::move(e));
  });
  out.vars.push_back(t_index);
  out.mats.push_back(-RealMatrix::Identity(b.rows, b.rows));
  return out;
}

inline RealMatrix lmi_value(const BarrierLmi& lmi, const RealVector& z) {
  RealMatrix g = lmi.g0;
  for (std::size_t k = 0; k < lmi.vars.size(); ++k) g += z(lmi.vars[k]) * lmi.mats[k];
  return g;
}

class BarrierProblem {
 public:
  BarrierProblem(std::vector<BarrierLmi> lmis, Eigen::Index var_count)
      : lmis_(std::move(lmis)), n_(var_count) {
    nu_ = 1.0;
    for (const BarrierLmi& l : lmis_) nu_ += static_cast<double>(l.g0.rows());
  }

  Eigen::Index size() const { return n_ + 1; }
  Eigen::Index t_index() const { return n_; }
  double barrier_parameter() const { return nu_; }
  const std::vector<BarrierLmi>& lmis() const { return lmis_; }

  // Objective -s t + barrier; +inf outside the interior.
  double value(const RealVector& z, double s) const {
    const double ball = 1.0 - z.head(n_).squaredNorm();
    if (!(ball > 0.0)) return std::numeric_limits<double>::infinity();
    double f = -s * z(n_) - std::log(ball);
    for (const BarrierLmi& lmi : lmis_) {
      Eigen::LLT<RealMatrix> llt(lmi_value(lmi, z));
      if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
      const RealVector diag = RealMatrix(llt.matrixL()).diagonal();
      if ((diag.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
      f -= 2.0 * diag.array().log().sum();
    }
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  }

  // Gradient and Hessian at an interior point.
  bool derivatives(const RealVector& z, double s, RealVector& grad, RealMatrix& hess) const {
    const Eigen::Index dim = size();
    grad = RealVector::Zero(dim);
    hess = RealMatrix::Zero(dim, dim);
    grad(n_) = -s;
    const RealVector x = z.head(n_);
    const double ball = 1.0 - x.squaredNorm();
    if (!(ball > 0.0)) return false;
    grad.head(n_) += 2.0 * x / ball;
    hess.topLeftCorner(n_, n_).diagonal().array() += 2.0 / ball;
    hess.topLeftCorner(n_, n_) += 4.0 * x * x.transpose() / (ball * ball);

    for (const BarrierLmi& lmi : lmis_) {
      Eigen::LLT<RealMatrix> llt(lmi_value(lmi, z));
      if (llt.info() != Eigen::Success) return false;
      const auto lower = llt.matrixL();
      const Eigen::Index m = lmi.g0.rows();
      const auto k = static_cast<Eigen::Index>(lmi.vars.size());
      RealMatrix packed(m * m, k);
      for (Eigen::Index v = 0; v < k; ++v) {
        const RealMatrix half = lower.solve(lmi.mats[static_cast<std::size_t>(v)]);
        const RealMatrix w = lower.solve(half.transpose());
        packed.col(v) = Eigen::Map<const RealVector>(w.data(), m * m);
        grad(lmi.vars[static_cast<std::size_t>(v)]) -= w.trace();
      }
      const RealMatrix local = packed.transpose() * packed;
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
          hess(lmi.vars[static_cast<std::size_t>(a)], lmi.vars[static_cast<std::size_t>(b)]) +=
              local(a, b);
        }
      }
    }
    return true;
  }

 private:
  std::vector<BarrierLmi> lmis_;
  Eigen::Index n_;
  double nu_;
};

inline RealVector solve_newton(const RealMatrix& hess, const RealVector& grad) {
  Eigen::LLT<RealMatrix> llt(hess);
  if (llt.info() == Eigen::Success) return -llt.solve(grad);
  const double shift = 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
  RealMatrix reg = hess;
  reg.diagonal().array() += shift;
  return -reg.ldlt().solve(grad);
}

// Backtracking search along `dir`; returns the accepted step or 0.
inline double line_search(const BarrierProblem& prob, const RealVector& z, const RealVector& dir,
                          double s, double f0, double slope) {
  double alpha = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double f = prob.value(z + alpha * dir, s);
    if (std::isfinite(f) && f <= f0 + 0.25 * alpha * slope) return alpha;
    alpha *= 0.5;
  }
  return 0.0;
}

}  // namespace internal

/// Maximizes the common margin t of every strict inequality in `sys`.
/// Feasible requires t > margin_tol and an independent residual_check()
/// whose every entry exceeds margin_tol; anything else is Undetermined.
inline SolveReport solve_feasibility(const LmiSystem& sys, const SolveOptions& opts = {}) {
  if (sys.constraints().empty()) {
    throw std::invalid_argument("solve_feasibility: system has no constraints");
  }
  const internal::BlockLayout layout(sys);
  const auto var_count = static_cast<Eigen::Index>(layout.count());
  const Eigen::Index t_index = var_count;

  std::vector<internal::BarrierLmi> lmis;
  for (const AffineConstraint& c : sys.constraints()) {
    lmis.push_back(internal::make_constraint_lmi(sys, layout, c, t_index));
  }
  for (std::size_t k = 0; k < sys.blocks().size(); ++k) {
    if (sys.blocks()[k].kind == BlockKind::kSymmetricPositive) {
      lmis.push_back(internal::make_block_lmi(sys.blocks()[k], layout, k, t_index));
    }
  }
  const internal::BarrierProblem prob(std::move(lmis), var_count);

  // Start at x = 0 with t below every constant part's smallest eigenvalue.
  RealVector z = RealVector::Zero(prob.size());
  double t0 = 0.0;
  for (const internal::BarrierLmi& lmi : prob.lmis()) {
    const RealMatrix g0 = 0.5 * (lmi.g0 + lmi.g0.transpose());
    t0 = std::min(t0, g0.rows() > 0 ? lambda_min(g0) : 0.0);
  }
  z(t_index) = t0 - 1.0;

  SolveReport report;
  double s = 1.0;
  const double mu = 10.0;
  RealVector grad;
  RealMatrix hess;
  bool stalled = false;
  bool out_of_iterations = false;

  while (true) {
    // Centering.
    while (true) {
      if (report.iterations >= opts.max_iter) {
        out_of_iterations = true;
        break;
      }
      if (!prob.derivatives(z, s, grad, hess)) {
        stalled = true;
        break;
      }
      RealVector dir = internal::solve_newton(hess, grad);
      double slope = grad.dot(dir);
      if (!std::isfinite(slope) || slope >= 0.0) {
        dir = -grad;
        slope = -grad.squaredNorm();
      }
      if (-slope / 2.0 <= 1e-10) break;
      const double f0 = prob.value(z, s);
      double alpha = internal::line_search(prob, z, dir, s, f0, slope);
      if (alpha == 0.0) {
        // Steepest-descent fallback when the Newton direction makes no progress.
        const double gnorm = grad.norm();
        dir = -grad / std::max(gnorm, 1e-300);
        alpha = internal::line_search(prob, z, dir, s, f0, -gnorm);
        if (alpha == 0.0) {
          stalled = true;
          break;
        }
      }
      z += alpha * dir;
      ++report.iterations;
    }
    const double t = z(t_index);
    const double gap = prob.barrier_parameter() / s;
    report.margin = t;
    if (!stalled && !out_of_iterations) {
      report.margin_upper_bound = std::min(report.margin_upper_bound, t + gap);
    }
    if (stalled || out_of_iterations) break;
    if (t + gap <= opts.margin_tol) {
      report.note = "optimal margin bounded above by the tolerance";
      report.converged = true;
      break;
    }
    if (gap <= 1e-6 * std::max(std::abs(t), 1e-3)) {
      report.converged = true;
      break;
    }
    s *= mu;
  }
  if (stalled) report.note = "line search stalled";
  if (out_of_iterations) report.note = "iteration limit reached";

  const Assignment a = layout.to_assignment(z.head(var_count));
  report.residual_margins = residual_check(sys, a);
  const double worst =
      *std::min_element(report.residual_margins.begin(), report.residual_margins.end());
  if (report.margin > opts.margin_tol && worst > opts.margin_tol) {
    report.status = SolveStatus::kFeasible;
    report.assignment = a;
  }
  return report;
}

}  // namespace dstab
