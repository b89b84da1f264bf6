#pragma once

// Sampling falsifier: evaluates family members, takes the roots of their
// determinants and reports the worst region value found. A certificate from
// the LMI side must never coexist with a violation found here.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dstab/polymatrix.hpp"
#include "dstab/regions.hpp"
#include "dstab/uncertainty.hpp"

namespace dstab {

struct SamplePlan {
  bool include_corners = true;
  int grid_per_axis = 0;
  int random_count = 0;
  std::uint64_t seed = 0;
  /// Lambda steps per polytopic edge; 0 skips edge sampling.
  int edge_density = 0;

  friend bool operator==(const SamplePlan&, const SamplePlan&) = default;
};

inline constexpr double kMaxPlanSamples = 1e6;

/// Roots whose region value is within this band of zero are reported as
/// boundary-grazing rather than as violations.
inline constexpr double kBoundaryBand = 1e-9;

enum class OracleStatus { kNoViolationFound, kFalsified, kDegreeDrop };

inline const char* to_string(OracleStatus s) {
  switch (s) {
    case OracleStatus::kNoViolationFound:
      return "no_violation_found";
    case OracleStatus::kFalsified:
      return "falsified";
    case OracleStatus::kDegreeDrop:
      return "degree_drop";
  }
  return "unknown";
}

struct StabilityReport {
  OracleStatus status = OracleStatus::kNoViolationFound;
  std::size_t samples_checked = 0;
  /// Max over samples of the max region value over that sample's roots.
  double worst_margin = -std::numeric_limits<double>::infinity();
  std::optional<std::size_t> worst_sample;
  /// Parameter vector (multilinear) or entry weights (polytopic) of the
  /// worst sample; set iff Falsified.
  std::optional<std::vector<double>> witness_q;
  std::optional<EntryWeights> witness_weights;
  std::optional<Complex> witness_root;
  std::size_t grazing_roots = 0;
  std::size_t degree_drops = 0;
};

namespace internal {

inline std::vector<double> grid_axis(double lo, double hi, int count) {
  std::vector<double> out;
  if (count == 1) {
    out.push_back(0.5 * (lo + hi));
    return out;
  }
  for (int k = 0; k < count; ++k) {
    out.push_back(k == count - 1 ? hi : lo + (hi - lo) * k / (count - 1));
  }
  return out;
}

inline void check_plan(const SamplePlan& plan) {
  if (plan.grid_per_axis < 0 || plan.random_count < 0 || plan.edge_density < 0) {
    throw std::invalid_argument("SamplePlan: counts must be non-negative");
  }
}

// Calls fn(q) for corners, then grid points, then uniform random draws.
template <typename Fn>
void for_each_box_sample(const ParameterBox& box, const SamplePlan& plan, Fn&& fn) {
  check_plan(plan);
  const int m = box.size();
  double total = plan.random_count;
  if (plan.include_corners) total += checked_power(2.0, m);
  if (plan.grid_per_axis > 0) total += checked_power(plan.grid_per_axis, m);
  if (total > kMaxPlanSamples) {
    throw std::invalid_argument("SamplePlan: more than 1e6 samples requested");
  }
  if (plan.include_corners) {
    for (const auto& q : corners(box)) fn(q);
  }
  if (plan.grid_per_axis > 0) {
    std::vector<std::vector<double>> axes;
    for (int j = 0; j < m; ++j) {
      axes.push_back(grid_axis(box.lo[static_cast<std::size_t>(j)],
                               box.hi[static_cast<std::size_t>(j)], plan.grid_per_axis));
    }
    const auto count = static_cast<std::uint64_t>(checked_power(plan.grid_per_axis, m));
    std::vector<double> q(static_cast<std::size_t>(m));
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      std::uint64_t rest = idx;
      for (int j = m - 1; j >= 0; --j) {
        q[static_cast<std::size_t>(j)] =
            axes[static_cast<std::size_t>(j)][rest % static_cast<std::uint64_t>(plan.grid_per_axis)];
        rest /= static_cast<std::uint64_t>(plan.grid_per_axis);
      }
      fn(q);
    }
  }
  std::mt19937_64 rng(plan.seed);
  for (int i = 0; i < plan.random_count; ++i) fn(random_point(box, rng));
}

// Calls fn(weights, member) for vertices (if requested), edge samples, then
// random interior members.
template <typename Fn>
void for_each_polytopic_sample(const PolytopicFamily& f, const SamplePlan& plan, Fn&& fn) {
  check_plan(plan);
  double total = plan.random_count;
  const double vertex_count = checked_power(f.vertex_count(), f.n * f.n);
  if (plan.include_corners) total += vertex_count;
  std::optional<EdgeSampler> edges;
  if (plan.edge_density > 0) {
    edges.emplace(f, plan.edge_density, plan.seed);
    total += static_cast<double>(edges->size());
  }
  if (total > kMaxPlanSamples) {
    throw std::invalid_argument("SamplePlan: more than 1e6 samples requested");
  }
  if (plan.include_corners) {
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(vertex_count); ++i) {
      const EntryWeights w = polytopic_vertex_weights(f, i);
      fn(w, polytopic_member(f, w));
    }
  }
  if (edges) {
    for (std::uint64_t i = 0; i < edges->size(); ++i) {
      const PolytopicSample s = (*edges)[i];
      fn(s.weights, s.member);
    }
  }
  std::mt19937_64 rng(plan.seed);
  for (int i = 0; i < plan.random_count; ++i) {
    const EntryWeights w = random_weights(f, rng);
    fn(w, polytopic_member(f, w));
  }
}

struct RootSet {
  ComplexScalarList roots;
  bool degree_dropped = false;
};

inline RootSet member_roots(const PolynomialMatrix& p) {
  const Polynomial d = det_poly(p);
  RootSet out;
  out.degree_dropped = d.degree() < p.size() * p.degree();
  bool all_zero = true;
  for (double c : d.coeffs) all_zero = all_zero && c == 0.0;
  if (all_zero) {
    out.degree_dropped = true;
    return out;
  }
  out.roots = poly_roots(d.coeffs);
  std::sort(out.roots.begin(), out.roots.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

class ReportBuilder {
 public:
  explicit ReportBuilder(const LmiRegion& region) : region_(region) {}

  // Returns true when this sample became the new worst.
  bool add(const PolynomialMatrix& member) {
    const RootSet rs = member_roots(member);
    const std::size_t index = report_.samples_checked++;
    if (rs.degree_dropped) ++report_.degree_drops;
    bool worst = false;
    for (const Complex& r : rs.roots) {
      const double v = region_.value(r);
      if (std::abs(v) < kBoundaryBand) ++report_.grazing_roots;
      if (v > report_.worst_margin) {
        report_.worst_margin = v;
        report_.worst_sample = index;
        worst_root_ = r;
        worst = true;
      }
    }
    return worst;
  }

  StabilityReport finish() {
    if (report_.worst_margin >= kBoundaryBand) {
      report_.status = OracleStatus::kFalsified;
      report_.witness_root = worst_root_;
    } else if (report_.degree_drops > 0) {
      report_.status = OracleStatus::kDegreeDrop;
    }
    return report_;
  }

  StabilityReport& report() { return report_; }

 private:
  const LmiRegion& region_;
  StabilityReport report_;
  Complex worst_root_;
};

}  // namespace internal

/// Checks corners, grid points and random draws of a multilinear family.
inline StabilityReport sample_multilinear(const MultilinearFamily& f, const LmiRegion& region,
                                          const SamplePlan& plan) {
  internal::ReportBuilder builder(region);
  std::vector<double> worst_q;
  internal::for_each_box_sample(f.box, plan, [&](const std::vector<double>& q) {
    if (builder.add(member_at(f, q))) worst_q = q;
  });
  StabilityReport report = builder.finish();
  if (report.status == OracleStatus::kFalsified) report.witness_q = worst_q;
  return report;
}

/// Checks vertices (if requested), exposed-edge samples and random
/// interior members of a polytopic family.
inline StabilityReport sample_polytopic(const PolytopicFamily& f, const LmiRegion& region,
                                        const SamplePlan& plan) {
  internal::ReportBuilder builder(region);
  EntryWeights worst_w;
  internal::for_each_polytopic_sample(
      f, plan, [&](const EntryWeights& w, const PolynomialMatrix& member) {
        if (builder.add(member)) worst_w = w;
      });
  StabilityReport report = builder.finish();
  if (report.status == OracleStatus::kFalsified) report.witness_weights = worst_w;
  return report;
}

/// Shortest decimal string that round-trips to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace internal {

inline std::string json_array(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += format_number(v[i]);
  }
  return out + "]";
}

inline std::string json_weights(const EntryWeights& w) {
  std::string out = "[";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i > 0) out += ',';
    out += json_array(w[i]);
  }
  return out + "]";
}

inline void write_root_rows(std::ostream& os, std::size_t sample, const std::string& label,
                            const PolynomialMatrix& member) {
  const RootSet rs = member_roots(member);
  for (const Complex& r : rs.roots) {
    os << sample << ",\"" << label << "\"," << format_number(r.real()) << ','
       << format_number(r.imag()) << '\n';
  }
}

}  // namespace internal

inline constexpr const char* kRootsCsvHeader = "sample,param_or_weight_json,root_re,root_im";

/// Root loci as CSV: one row per (sample, root), sample-major, roots sorted
/// by real then imaginary part. The parameter column holds a JSON array
/// (the q vector, or per-entry weight lists) quoted as one CSV field.
inline void write_roots_csv(std::ostream& os, const MultilinearFamily& f, const SamplePlan& plan) {
  os << kRootsCsvHeader << '\n';
  std::size_t sample = 0;
  internal::for_each_box_sample(f.box, plan, [&](const std::vector<double>& q) {
    internal::write_root_rows(os, sample++, internal::json_array(q), member_at(f, q));
  });
}

inline void write_roots_csv(std::ostream& os, const PolytopicFamily& f, const SamplePlan& plan) {
  os << kRootsCsvHeader << '\n';
  std::size_t sample = 0;
  internal::for_each_polytopic_sample(
      f, plan, [&](const EntryWeights& w, const PolynomialMatrix& member) {
        internal::write_root_rows(os, sample++, internal::json_weights(w), member);
      });
}

template <typename Family>
std::string roots_csv(const Family& f, const SamplePlan& plan) {
  std::ostringstream os;
  write_roots_csv(os, f, plan);
  return os.str();
}

}  // namespace dstab
