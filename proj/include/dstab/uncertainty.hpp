#pragma once

// Interval multilinear and polytopic families of polynomial matrices, their
// vertex and exposed-edge sets, and the corner weights that write any member
// of a multilinear family as a convex combination of its vertices.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dstab/polymatrix.hpp"

namespace dstab {

/// Axis-aligned box of interval parameters, lo[i] <= q_i <= hi[i].
struct ParameterBox {
  std::vector<double> lo;
  std::vector<double> hi;

  ParameterBox() = default;
  ParameterBox(std::vector<double> lower, std::vector<double> upper)
      : lo(std::move(lower)), hi(std::move(upper)) {
    if (lo.size() != hi.size()) {
      throw std::invalid_argument("ParameterBox: bound lists differ in length");
    }
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i]) {
        throw std::invalid_argument("ParameterBox: need finite lo <= hi for q" +
                                    std::to_string(i + 1));
      }
    }
  }

  int size() const { return static_cast<int>(lo.size()); }

  bool contains(const std::vector<double>& q) const {
    if (q.size() != lo.size()) return false;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (!(q[i] >= lo[i] && q[i] <= hi[i])) return false;
    }
    return true;
  }

  friend bool operator==(const ParameterBox&, const ParameterBox&) = default;
};

/// One product term coef * prod_{j in subset} q_j (0-based indices).
struct MultilinearTerm {
  std::vector<int> subset;
  double coef = 0.0;

  friend bool operator==(const MultilinearTerm&, const MultilinearTerm&) = default;
};

/// Function of q that is affine in each coordinate separately.
class MultilinearScalar {
 public:
  MultilinearScalar() = default;
  MultilinearScalar(int m, std::vector<MultilinearTerm> terms)
      : m_(m), terms_(std::move(terms)) {
    if (m < 0) throw std::invalid_argument("MultilinearScalar: negative m");
    for (MultilinearTerm& t : terms_) {
      std::sort(t.subset.begin(), t.subset.end());
      if (std::adjacent_find(t.subset.begin(), t.subset.end()) != t.subset.end()) {
        throw std::invalid_argument("MultilinearScalar: repeated index in a term");
      }
      for (int j : t.subset) {
        if (j < 0 || j >= m) {
          throw std::invalid_argument("MultilinearScalar: index outside 1..m");
        }
      }
      if (!std::isfinite(t.coef)) {
        throw std::invalid_argument("MultilinearScalar: non-finite coefficient");
      }
    }
  }

  static MultilinearScalar constant(int m, double value) {
    return MultilinearScalar(m, {{{}, value}});
  }

  int size() const { return m_; }
  const std::vector<MultilinearTerm>& terms() const { return terms_; }

  double operator()(const std::vector<double>& q) const {
    if (q.size() != static_cast<std::size_t>(m_)) {
      throw std::invalid_argument("MultilinearScalar: parameter vector has wrong length");
    }
    double sum = 0.0;
    for (const MultilinearTerm& t : terms_) {
      double prod = t.coef;
      for (int j : t.subset) prod *= q[static_cast<std::size_t>(j)];
      sum += prod;
    }
    return sum;
  }

  friend bool operator==(const MultilinearScalar&, const MultilinearScalar&) = default;

 private:
  int m_ = 0;
  std::vector<MultilinearTerm> terms_;
};

inline double eval_coeff(const MultilinearScalar& a, const std::vector<double>& q) {
  return a(q);
}

/// { sum_i a_i(q) A_i(s) : q in box }.
struct MultilinearFamily {
  std::vector<PolynomialMatrix> bases;
  std::vector<MultilinearScalar> coeffs;
  ParameterBox box;

  MultilinearFamily() = default;
  MultilinearFamily(std::vector<PolynomialMatrix> b, std::vector<MultilinearScalar> a,
                    ParameterBox q)
      : bases(std::move(b)), coeffs(std::move(a)), box(std::move(q)) {
    if (bases.empty()) {
      throw std::invalid_argument("MultilinearFamily: needs at least one base matrix");
    }
    if (coeffs.size() != bases.size()) {
      throw std::invalid_argument("MultilinearFamily: one coefficient function per base");
    }
    for (const PolynomialMatrix& p : bases) {
      if (p.size() != bases.front().size() || p.degree() != bases.front().degree()) {
        throw std::invalid_argument("MultilinearFamily: bases must share n and degree");
      }
    }
    for (const MultilinearScalar& a : coeffs) {
      if (a.size() != box.size()) {
        throw std::invalid_argument("MultilinearFamily: coefficient arity differs from box");
      }
    }
  }

  int n() const { return bases.front().size(); }
  int degree() const { return bases.front().degree(); }
  int parameter_count() const { return box.size(); }
};

/// Entry (i, j) ranges over the convex hull of vertices[i*n + j].
struct PolytopicFamily {
  int n = 0;
  int degree = 0;
  std::vector<std::vector<Polynomial>> entries;  // row-major, m vertices each

  PolytopicFamily() = default;
  PolytopicFamily(int size, int deg, std::vector<std::vector<Polynomial>> e)
      : n(size), degree(deg), entries(std::move(e)) {
    if (n < 1 || degree < 0) {
      throw std::invalid_argument("PolytopicFamily: need n >= 1 and degree >= 0");
    }
    if (entries.size() != static_cast<std::size_t>(n * n)) {
      throw std::invalid_argument("PolytopicFamily: need n*n entries");
    }
    const std::size_t m = entries.front().size();
    if (m == 0) throw std::invalid_argument("PolytopicFamily: entries need vertices");
    for (auto& list : entries) {
      if (list.size() != m) {
        throw std::invalid_argument("PolytopicFamily: every entry needs the same vertex count");
      }
      for (Polynomial& p : list) p = p.padded(static_cast<std::size_t>(degree + 1));
    }
  }

  int vertex_count() const { return static_cast<int>(entries.front().size()); }
};

/// Per-entry convex weights for a polytopic member, row-major.
using EntryWeights = std::vector<std::vector<double>>;

inline constexpr int kMaxCornerParameters = 20;

/// All 2^m corners, lexicographic with the lower bound first per coordinate
/// and q_1 the slowest-varying coordinate.
inline std::vector<std::vector<double>> corners(const ParameterBox& box) {
  const int m = box.size();
  if (m > kMaxCornerParameters) {
    throw std::invalid_argument("corners: more than 20 parameters");
  }
  const std::size_t count = std::size_t{1} << m;
  std::vector<std::vector<double>> out(count, std::vector<double>(static_cast<std::size_t>(m)));
  for (std::size_t c = 0; c < count; ++c) {
    for (int j = 0; j < m; ++j) {
      const bool upper = (c >> (m - 1 - j)) & 1U;
      out[c][static_cast<std::size_t>(j)] =
          upper ? box.hi[static_cast<std::size_t>(j)] : box.lo[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

inline PolynomialMatrix member_at(const MultilinearFamily& f, const std::vector<double>& q) {
  if (!f.box.contains(q)) {
    throw std::invalid_argument("member_at: parameter vector outside the box");
  }
  std::vector<std::pair<double, PolynomialMatrix>> terms;
  terms.reserve(f.bases.size());
  for (std::size_t i = 0; i < f.bases.size(); ++i) {
    terms.emplace_back(f.coeffs[i](q), f.bases[i]);
  }
  return scale_add(terms);
}

/// Members at every corner, in corners() order; duplicates are kept.
inline std::vector<PolynomialMatrix> vertex_matrices(const MultilinearFamily& f) {
  std::vector<PolynomialMatrix> out;
  for (const auto& q : corners(f.box)) out.push_back(member_at(f, q));
  return out;
}

/// Convex weights over corners() such that any multilinear a satisfies
/// sum_c w_c a(corner_c) = a(q). Each weight is the product of per-axis
/// interpolation factors; a collapsed interval puts all of its mass on the
/// lower branch.
inline std::vector<double> hull_weights(const ParameterBox& box, const std::vector<double>& q) {
  if (!box.contains(q)) {
    throw std::invalid_argument("hull_weights: parameter vector outside the box");
  }
  const int m = box.size();
  if (m > kMaxCornerParameters) {
    throw std::invalid_argument("hull_weights: more than 20 parameters");
  }
  std::vector<double> lower_share(static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < lower_share.size(); ++j) {
    const double width = box.hi[j] - box.lo[j];
    lower_share[j] = width > 0.0 ? (box.hi[j] - q[j]) / width : 1.0;
  }
  const std::size_t count = std::size_t{1} << m;
  std::vector<double> w(count, 1.0);
  for (std::size_t c = 0; c < count; ++c) {
    for (int j = 0; j < m; ++j) {
      const bool upper = (c >> (m - 1 - j)) & 1U;
      const double share = lower_share[static_cast<std::size_t>(j)];
      w[c] *= upper ? 1.0 - share : share;
    }
  }
  return w;
}

namespace internal {

// Number of members the enumeration would produce; saturates at +inf.
inline double checked_power(double base, int exponent) {
  double out = 1.0;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

inline std::vector<double> indicator(std::size_t m, std::size_t k) {
  std::vector<double> w(m, 0.0);
  w[k] = 1.0;
  return w;
}

}  // namespace internal

inline constexpr double kMaxPolytopicVertices = 1e6;

/// Entrywise convex combination of vertex polynomials.
inline PolynomialMatrix polytopic_member(const PolytopicFamily& f, const EntryWeights& weights) {
  if (weights.size() != f.entries.size()) {
    throw std::invalid_argument("polytopic_member: need one weight list per entry");
  }
  const std::size_t m = static_cast<std::size_t>(f.vertex_count());
  std::vector<Polynomial> entries;
  entries.reserve(f.entries.size());
  for (std::size_t e = 0; e < f.entries.size(); ++e) {
    const std::vector<double>& w = weights[e];
    if (w.size() != m) {
      throw std::invalid_argument("polytopic_member: weight list has wrong length");
    }
    double total = 0.0;
    for (double x : w) {
      if (!(x >= 0.0)) throw std::invalid_argument("polytopic_member: negative weight");
      total += x;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("polytopic_member: weights must sum to 1");
    }
    std::vector<double> c(static_cast<std::size_t>(f.degree + 1), 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t d = 0; d < c.size(); ++d) c[d] += w[k] * f.entries[e][k].coeffs[d];
    }
    entries.emplace_back(std::move(c));
  }
  return PolynomialMatrix::from_entries(f.n, f.degree, entries);
}

/// Weights of the vertex with mixed-radix index `index` (entry 0 is the most
/// significant digit).
inline EntryWeights polytopic_vertex_weights(const PolytopicFamily& f, std::uint64_t index) {
  const std::size_t m = static_cast<std::size_t>(f.vertex_count());
  EntryWeights w(f.entries.size());
  for (std::size_t e = f.entries.size(); e-- > 0;) {
    w[e] = internal::indicator(m, static_cast<std::size_t>(index % m));
    index /= m;
  }
  return w;
}

/// Every matrix whose entries are all vertex polynomials, mixed-radix order.
inline std::vector<PolynomialMatrix> polytopic_vertices(const PolytopicFamily& f) {
  const double count = internal::checked_power(f.vertex_count(), f.n * f.n);
  if (count > kMaxPolytopicVertices) {
    throw std::invalid_argument("polytopic_vertices: more than 1e6 vertex matrices");
  }
  std::vector<PolynomialMatrix> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(count); ++i) {
    out.push_back(polytopic_member(f, polytopic_vertex_weights(f, i)));
  }
  return out;
}

struct PolytopicSample {
  EntryWeights weights;
  PolynomialMatrix member;
};

inline constexpr int kMaxEdgePermutationSize = 5;
inline constexpr std::uint64_t kDefaultEdgeSampleCap = 1'000'000;

/// Enumerates the exposed-edge set on a lambda grid.
///
/// For each permutation l of the columns, entry (k, l_k) of every row moves
/// along an edge between two of its vertices while all other entries sit on
/// vertices. Each edge is sampled at lambda in {0, 1/density, ..., 1}.
/// When m == 1 there are no edges and the single vertex matrix is returned.
/// If the full enumeration exceeds `cap`, a seeded uniform subsample of
/// `cap` members is returned in enumeration order.
class EdgeSampler {
 public:
  EdgeSampler(const PolytopicFamily& f, int density, std::uint64_t seed = 0,
              std::uint64_t cap = kDefaultEdgeSampleCap)
      : family_(f), density_(density) {
    if (f.n > kMaxEdgePermutationSize) {
      throw std::invalid_argument("edge_samples: n > 5");
    }
    if (density < 1) {
      throw std::invalid_argument("edge_samples: density must be at least 1");
    }
    const int n = f.n;
    const int m = f.vertex_count();
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    do {
      permutations_.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (int k = 0; k < m; ++k) {
      for (int t = k + 1; t < m; ++t) pairs_.emplace_back(k, t);
    }
    if (m == 1) {
      total_ = 1;
    } else {
      const double total = static_cast<double>(permutations_.size()) *
                           internal::checked_power(static_cast<double>(pairs_.size()), n) *
                           internal::checked_power(m, n * n - n) * (density + 1);
      if (total > 4.0e18) {
        throw std::invalid_argument("edge_samples: enumeration too large");
      }
      total_ = static_cast<std::uint64_t>(total);
    }
    if (total_ > cap) {
      // Floyd's algorithm for `cap` distinct indices out of total_.
      std::mt19937_64 rng(seed);
      std::set<std::uint64_t> chosen;
      for (std::uint64_t j = total_ - cap; j < total_; ++j) {
        std::uniform_int_distribution<std::uint64_t> dist(0, j);
        const std::uint64_t r = dist(rng);
        if (!chosen.insert(r).second) chosen.insert(j);
      }
      subsample_.assign(chosen.begin(), chosen.end());
    }
  }

  std::uint64_t size() const { return subsample_.empty() ? total_ : subsample_.size(); }
  std::uint64_t full_size() const { return total_; }

  PolytopicSample operator[](std::uint64_t i) const {
    const std::uint64_t index = subsample_.empty() ? i : subsample_.at(i);
    const EntryWeights w = weights_at(index);
    return {w, polytopic_member(family_, w)};
  }

 private:
  EntryWeights weights_at(std::uint64_t index) const {
    const PolytopicFamily& f = family_;
    const std::size_t m = static_cast<std::size_t>(f.vertex_count());
    if (m == 1) return polytopic_vertex_weights(f, 0);
    const int n = f.n;
    // Digits, least significant first: lambda step, free entries, pairs
    // per row, permutation.
    const std::uint64_t step = index % static_cast<std::uint64_t>(density_ + 1);
    index /= static_cast<std::uint64_t>(density_ + 1);

    const std::size_t perm_count = permutations_.size();
    const std::uint64_t pair_count = pairs_.size();
    std::vector<std::uint64_t> free_digits(static_cast<std::size_t>(n * n - n));
    for (std::size_t d = free_digits.size(); d-- > 0;) {
      free_digits[d] = index % m;
      index /= m;
    }
    std::vector<std::uint64_t> pair_digits(static_cast<std::size_t>(n));
    for (std::size_t d = pair_digits.size(); d-- > 0;) {
      pair_digits[d] = index % pair_count;
      index /= pair_count;
    }
    const std::vector<int>& perm = permutations_.at(static_cast<std::size_t>(index % perm_count));

    const double lambda = static_cast<double>(step) / density_;
    EntryWeights w(static_cast<std::size_t>(n * n));
    std::size_t free_pos = 0;
    for (int row = 0; row < n; ++row) {
      for (int col = 0; col < n; ++col) {
        const auto e = static_cast<std::size_t>(row * n + col);
        if (perm[static_cast<std::size_t>(row)] == col) {
          const auto [k, t] = pairs_[pair_digits[static_cast<std::size_t>(row)]];
          w[e].assign(m, 0.0);
          w[e][static_cast<std::size_t>(k)] = lambda;
          w[e][static_cast<std::size_t>(t)] += 1.0 - lambda;
        } else {
          w[e] = internal::indicator(m, free_digits[free_pos++]);
        }
      }
    }
    return w;
  }

  PolytopicFamily family_;
  int density_;
  std::vector<std::vector<int>> permutations_;
  std::vector<std::pair<int, int>> pairs_;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> subsample_;
};

inline std::vector<PolytopicSample> edge_samples(const PolytopicFamily& f, int density,
                                                 std::uint64_t seed = 0,
                                                 std::uint64_t cap = kDefaultEdgeSampleCap) {
  const EdgeSampler sampler(f, density, seed, cap);
  std::vector<PolytopicSample> out;
  out.reserve(sampler.size());
  for (std::uint64_t i = 0; i < sampler.size(); ++i) out.push_back(sampler[i]);
  return out;
}

/// Uniform point in the box, one draw per coordinate.
inline std::vector<double> random_point(const ParameterBox& box, std::mt19937_64& rng) {
  std::vector<double> q(box.lo.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    std::uniform_real_distribution<double> dist(box.lo[j], box.hi[j]);
    q[j] = box.lo[j] == box.hi[j] ? box.lo[j] : dist(rng);
  }
  return q;
}

/// Uniform (flat Dirichlet) weights for every entry, via normalized
/// exponential draws.
inline EntryWeights random_weights(const PolytopicFamily& f, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  const std::size_t m = static_cast<std::size_t>(f.vertex_count());
  EntryWeights w(f.entries.size(), std::vector<double>(m));
  for (auto& list : w) {
    double total = 0.0;
    for (double& x : list) {
      x = expo(rng);
      total += x;
    }
    for (double& x : list) x /= total;
  }
  return w;
}

struct FixedDegreeCheck {
  bool ok = true;
  /// True when corner/vertex checks are conclusive (scalar families); for
  /// matrix families the check is a sampling heuristic.
  bool exact = false;
  int points_checked = 0;
  double min_abs_leading = std::numeric_limits<double>::infinity();
  std::string detail;
};

inline constexpr int kFixedDegreeRandomSamples = 100;

namespace internal {

inline void record_leading(FixedDegreeCheck& check, int& sign, const PolynomialMatrix& p) {
  const RealMatrix& lead = p.block(p.degree());
  const double det = lead.rows() == 1 ? lead(0, 0) : lead.partialPivLu().determinant();
  ++check.points_checked;
  check.min_abs_leading = std::min(check.min_abs_leading, std::abs(det));
  const int s = det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
  if (s == 0) {
    check.ok = false;
    check.detail = "leading coefficient block is singular";
  } else if (sign == 0) {
    sign = s;
  } else if (s != sign) {
    check.ok = false;
    check.detail = "leading coefficient determinant changes sign";
  }
}

}  // namespace internal

/// Checks that the leading block stays nonsingular with constant
/// determinant sign over all corners plus random box samples, so the
/// determinant degree n*l does not drop across the family.
inline FixedDegreeCheck check_fixed_degree(const MultilinearFamily& f, std::uint64_t seed) {
  FixedDegreeCheck check;
  check.exact = f.n() == 1;
  int sign = 0;
  for (const auto& q : corners(f.box)) internal::record_leading(check, sign, member_at(f, q));
  std::mt19937_64 rng(seed);
  for (int i = 0; i < kFixedDegreeRandomSamples; ++i) {
    internal::record_leading(check, sign, member_at(f, random_point(f.box, rng)));
  }
  return check;
}

inline FixedDegreeCheck check_fixed_degree(const PolytopicFamily& f, std::uint64_t seed) {
  FixedDegreeCheck check;
  check.exact = f.n == 1;
  int sign = 0;
  const double count = internal::checked_power(f.vertex_count(), f.n * f.n);
  if (count <= kMaxPolytopicVertices) {
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(count); ++i) {
      internal::record_leading(check, sign, polytopic_member(f, polytopic_vertex_weights(f, i)));
    }
  } else {
    check.exact = false;
  }
  std::mt19937_64 rng(seed);
  for (int i = 0; i < kFixedDegreeRandomSamples; ++i) {
    internal::record_leading(check, sign, polytopic_member(f, random_weights(f, rng)));
  }
  return check;
}

}  // namespace dstab
