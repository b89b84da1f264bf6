#pragma once

// End-to-end verdicts: fixed-degree check, vertex enumeration, LMI assembly
// and solve, then the sampling cross-check.

#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "dstab/lmi.hpp"
#include "dstab/oracle.hpp"
#include "dstab/problem.hpp"
#include "dstab/sdp.hpp"
#include "dstab/uncertainty.hpp"

namespace dstab {

enum class Verdict { kCertified, kFalsified, kUndetermined };

/// Process exit codes shared by the CLI commands.
enum ExitCode : int {
  kExitCertified = 0,
  kExitFalsified = 1,
  kExitUndetermined = 2,
  kExitInputError = 3,
};

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kCertified:
      return "certified";
    case Verdict::kFalsified:
      return "falsified";
    case Verdict::kUndetermined:
      return "undetermined";
  }
  return "unknown";
}

struct AnalysisResult {
  Verdict verdict = Verdict::kUndetermined;
  int exit_code = kExitUndetermined;
  std::string family_kind;
  FixedDegreeCheck degree_check;
  std::size_t vertex_count = 0;
  std::size_t lmi_count = 0;
  SolveReport solve;
  std::optional<StabilityReport> oracle;
  /// Feasible certificate together with an oracle violation. Never expected;
  /// surfaced loudly if it happens.
  bool soundness_conflict = false;
};

namespace internal {

inline std::vector<CoefficientMatrix> vertex_coefficients(const Family& family) {
  std::vector<CoefficientMatrix> cms;
  if (const auto* f = std::get_if<MultilinearFamily>(&family)) {
    for (const PolynomialMatrix& p : vertex_matrices(*f)) cms.push_back(coefficient_matrix(p));
  } else {
    for (const PolynomialMatrix& p : polytopic_vertices(std::get<PolytopicFamily>(family))) {
      cms.push_back(coefficient_matrix(p));
    }
  }
  return cms;
}

}  // namespace internal

inline StabilityReport run_oracle(const Family& family, const LmiRegion& region,
                                  const SamplePlan& plan) {
  if (const auto* f = std::get_if<MultilinearFamily>(&family)) {
    return sample_multilinear(*f, region, plan);
  }
  return sample_polytopic(std::get<PolytopicFamily>(family), region, plan);
}

inline AnalysisResult analyze(const ProblemFile& pf, bool with_oracle = true) {
  AnalysisResult out;
  const bool multilinear = std::holds_alternative<MultilinearFamily>(pf.family);
  out.family_kind = multilinear ? "multilinear" : "polytopic";
  out.degree_check = multilinear
                         ? check_fixed_degree(std::get<MultilinearFamily>(pf.family), pf.plan.seed)
                         : check_fixed_degree(std::get<PolytopicFamily>(pf.family), pf.plan.seed);

  const std::vector<CoefficientMatrix> cms = internal::vertex_coefficients(pf.family);
  out.vertex_count = cms.size();
  const VertexLmiOptions lmi_opts{pf.solver.shared_p};
  const LmiSystem sys = multilinear ? assemble_multilinear(cms, pf.region, lmi_opts)
                                    : assemble_polytopic(cms, pf.region, lmi_opts);
  out.lmi_count = sys.lmi_count();
  out.solve = solve_feasibility(sys, pf.solver.options);

  if (with_oracle) out.oracle = run_oracle(pf.family, pf.region, pf.plan);

  const bool feasible = out.solve.status == SolveStatus::kFeasible;
  const bool falsified = out.oracle && out.oracle->status == OracleStatus::kFalsified;
  const bool oracle_clean = !out.oracle || out.oracle->status == OracleStatus::kNoViolationFound;
  out.soundness_conflict = feasible && falsified && out.degree_check.ok;
  if (falsified) {
    out.verdict = Verdict::kFalsified;
    out.exit_code = kExitFalsified;
  } else if (feasible && oracle_clean && out.degree_check.ok) {
    out.verdict = Verdict::kCertified;
    out.exit_code = kExitCertified;
  } else {
    out.verdict = Verdict::kUndetermined;
    out.exit_code = kExitUndetermined;
  }
  return out;
}

namespace internal {

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json weights_json(const EntryWeights& w) {
  Json out = Json::array();
  for (const auto& list : w) out.push_back(list);
  return out;
}

}  // namespace internal

inline Json oracle_json(const StabilityReport& r) {
  Json j = {{"status", to_string(r.status)},
            {"samples_checked", r.samples_checked},
            {"grazing_roots", r.grazing_roots},
            {"degree_drops", r.degree_drops}};
  j["worst_margin"] = r.samples_checked > 0 && std::isfinite(r.worst_margin)
                          ? Json(r.worst_margin)
                          : Json(nullptr);
  if (r.worst_sample) j["worst_sample"] = *r.worst_sample;
  if (r.witness_q) j["witness_q"] = *r.witness_q;
  if (r.witness_weights) j["witness_weights"] = internal::weights_json(*r.witness_weights);
  if (r.witness_root) j["witness_root"] = internal::complex_json(*r.witness_root);
  return j;
}

inline Json analysis_json(const AnalysisResult& a, const ProblemFile& pf) {
  double min_residual = std::numeric_limits<double>::infinity();
  for (double v : a.solve.residual_margins) min_residual = std::min(min_residual, v);
  Json solver = {{"status", to_string(a.solve.status)},
                 {"margin", a.solve.margin},
                 {"margin_upper_bound", std::isfinite(a.solve.margin_upper_bound)
                                            ? Json(a.solve.margin_upper_bound)
                                            : Json(nullptr)},
                 {"min_residual_margin", min_residual},
                 {"iterations", a.solve.iterations},
                 {"converged", a.solve.converged},
                 {"margin_tol", pf.solver.options.margin_tol},
                 {"shared_p", pf.solver.shared_p}};
  if (!a.solve.note.empty()) solver["note"] = a.solve.note;
  Json j = {{"verdict", to_string(a.verdict)},
            {"exit_code", a.exit_code},
            {"region", pf.region.name()},
            {"family", a.family_kind},
            {"vertex_count", a.vertex_count},
            {"lmi_count", a.lmi_count},
            {"fixed_degree",
             {{"ok", a.degree_check.ok},
              {"exact", a.degree_check.exact},
              {"points_checked", a.degree_check.points_checked}}},
            {"solver", solver},
            {"soundness_conflict", a.soundness_conflict}};
  j["oracle"] = a.oracle ? oracle_json(*a.oracle) : Json(nullptr);
  return j;
}

inline std::string describe_oracle(const StabilityReport& r) {
  std::ostringstream os;
  os << "oracle: " << r.samples_checked << " sample" << (r.samples_checked == 1 ? "" : "s")
     << " checked";
  if (r.samples_checked == 0) {
    os << " (empty plan, nothing was sampled)";
    return os.str();
  }
  os << ", worst region value " << format_number(r.worst_margin);
  switch (r.status) {
    case OracleStatus::kNoViolationFound:
      os << ", no violation found";
      break;
    case OracleStatus::kFalsified:
      os << ", VIOLATION at sample " << *r.worst_sample;
      if (r.witness_q) os << " q=" << internal::json_array(*r.witness_q);
      if (r.witness_weights) os << " weights=" << internal::json_weights(*r.witness_weights);
      if (r.witness_root) {
        os << " root=" << format_number(r.witness_root->real())
           << (r.witness_root->imag() < 0 ? "" : "+") << format_number(r.witness_root->imag())
           << "i";
      }
      break;
    case OracleStatus::kDegreeDrop:
      os << ", determinant degree dropped at " << r.degree_drops << " sample(s)";
      break;
  }
  if (r.grazing_roots > 0) os << "; " << r.grazing_roots << " root(s) graze the boundary";
  return os.str();
}

inline std::string analysis_text(const AnalysisResult& a, const ProblemFile& pf) {
  std::ostringstream os;
  const std::string stable = "robust " + pf.region.stability_name() + " stable";
  switch (a.verdict) {
    case Verdict::kCertified:
      os << "Certified " << stable;
      if (!a.oracle) os << " (LMI certificate only; oracle cross-check skipped)";
      break;
    case Verdict::kFalsified:
      os << "Falsified: family is not " << stable;
      break;
    case Verdict::kUndetermined:
      os << "Undetermined: could not certify " << stable;
      break;
  }
  os << '\n';
  os << "family: " << a.family_kind << ", " << a.vertex_count << " vertices, " << a.lmi_count
     << " LMIs" << (pf.solver.shared_p ? " (shared P)" : "") << '\n';
  os << "solver: " << to_string(a.solve.status) << ", margin " << format_number(a.solve.margin)
     << " (tol " << format_number(pf.solver.options.margin_tol) << "), " << a.solve.iterations
     << " iterations";
  if (!a.solve.note.empty()) os << ", " << a.solve.note;
  os << '\n';
  os << "fixed degree: " << (a.degree_check.ok ? "ok" : "FAILED") << " ("
     << (a.degree_check.exact ? "exact" : "sampled") << ", " << a.degree_check.points_checked
     << " points)";
  if (!a.degree_check.ok) os << ": " << a.degree_check.detail;
  os << '\n';
  if (a.oracle) os << describe_oracle(*a.oracle) << '\n';
  if (a.soundness_conflict) {
    os << "ERROR: LMI certificate contradicts an oracle witness; please report this problem file\n";
  }
  return os.str();
}

/// Exit code for the sample command.
inline int oracle_exit_code(const StabilityReport& r) {
  switch (r.status) {
    case OracleStatus::kNoViolationFound:
      return kExitCertified;
    case OracleStatus::kFalsified:
      return kExitFalsified;
    case OracleStatus::kDegreeDrop:
      break;
  }
  return kExitUndetermined;
}

}  // namespace dstab
