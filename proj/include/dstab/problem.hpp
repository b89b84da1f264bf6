#pragma once

// JSON problem files: a region, a multilinear or polytopic family, solver
// options and a sampling plan. Parse errors carry the JSON pointer of the
// offending value.
//
//   {
//     "region": {"type": "lhp" | "disk" | "custom", "B": [[b00, b01], [b10, b11]]},
//     "family": {
//       "kind": "multilinear", "n": 1, "l": 3, "N": 2, "scale": 1.0,
//       "bases": [[A_0, A_1, ..., A_l], ...],          // n x n row-major blocks
//       "coefficients": [[{"subset": [1, 2], "coef": 0.1}, ...], ...],
//       "box": [[lo, hi], ...]
//     } | {
//       "kind": "polytopic", "n": 2, "degree": 1, "scale": 1.0,
//       "entries": [[[[c0, c1], ...vertices], ...columns], ...rows]
//     },
//     "solver": {"margin_tol": 1e-7, "max_iter": 500, "seed": 0, "shared_p": false},
//     "plan": {"include_corners": true, "grid_per_axis": 5, "random_count": 2000,
//              "seed": 0, "edge_density": 20}
//   }
//
// Parameter indices in "subset" are 1-based. "scale" multiplies every
// coefficient at load time and is not written back.

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dstab/oracle.hpp"
#include "dstab/regions.hpp"
#include "dstab/sdp.hpp"
#include "dstab/uncertainty.hpp"

namespace dstab {

using Json = nlohmann::json;
using Family = std::variant<MultilinearFamily, PolytopicFamily>;

class ProblemError : public std::runtime_error {
 public:
  ProblemError(const std::string& where, const std::string& what)
      : std::runtime_error((where.empty() ? std::string("/") : where) + ": " + what),
        where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct SolverSettings {
  SolveOptions options;
  bool shared_p = false;
};

inline SamplePlan default_plan() {
  SamplePlan plan;
  plan.include_corners = true;
  plan.grid_per_axis = 5;
  plan.random_count = 2000;
  plan.seed = 0;
  plan.edge_density = 20;
  return plan;
}

struct ProblemFile {
  LmiRegion region = LmiRegion::lhp();
  Family family;
  SolverSettings solver;
  SamplePlan plan = default_plan();
};

namespace internal {

class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const Json& json() const { return j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw ProblemError(path_, what); }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

  Reader at(const char* key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) fail(std::string("missing key \"") + key + "\"");
    return Reader(j_.at(key), path_ + "/" + key);
  }

  Reader at(std::size_t i) const { return Reader(j_.at(i), path_ + "/" + std::to_string(i)); }

  std::size_t array_size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("number is not finite");
    return v;
  }

  int integer(int lo, int hi) const {
    if (!j_.is_number_integer()) fail("expected an integer");
    const auto v = j_.get<long long>();
    if (v < lo || v > hi) {
      fail("integer out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return static_cast<int>(v);
  }

  std::uint64_t unsigned_integer() const {
    if (!j_.is_number_integer() || j_.get<long long>() < 0) fail("expected a non-negative integer");
    return j_.get<std::uint64_t>();
  }

  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }

  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  RealMatrix matrix(int rows, int cols, double scale = 1.0) const {
    if (array_size() != static_cast<std::size_t>(rows)) {
      fail("expected " + std::to_string(rows) + " rows");
    }
    RealMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      const Reader row = at(static_cast<std::size_t>(i));
      if (row.array_size() != static_cast<std::size_t>(cols)) {
        row.fail("expected " + std::to_string(cols) + " columns");
      }
      for (int k = 0; k < cols; ++k) m(i, k) = scale * row.at(static_cast<std::size_t>(k)).number();
    }
    return m;
  }

 private:
  const Json& j_;
  std::string path_;
};

inline LmiRegion parse_region(const Reader& r) {
  const std::string type = r.at("type").string();
  if (type == "lhp") return LmiRegion::lhp();
  if (type == "disk") return LmiRegion::unit_disk();
  if (type == "custom") {
    const Reader b = r.at("B");
    const RealMatrix m = b.matrix(2, 2);
    try {
      return LmiRegion::custom(m);
    } catch (const std::invalid_argument& e) {
      b.fail(e.what());
    }
  }
  r.at("type").fail("unknown region type \"" + type + "\"");
}

inline MultilinearFamily parse_multilinear(const Reader& r) {
  const int n = r.at("n").integer(1, 64);
  const int l = r.at("l").integer(0, 64);
  const double scale = r.has("scale") ? r.at("scale").number() : 1.0;

  const Reader box_r = r.at("box");
  std::vector<double> lo;
  std::vector<double> hi;
  for (std::size_t i = 0; i < box_r.array_size(); ++i) {
    const Reader pair = box_r.at(i);
    if (pair.array_size() != 2) pair.fail("expected [lo, hi]");
    lo.push_back(pair.at(std::size_t{0}).number());
    hi.push_back(pair.at(std::size_t{1}).number());
    if (lo.back() > hi.back()) pair.fail("lo exceeds hi");
  }
  if (lo.size() > static_cast<std::size_t>(kMaxCornerParameters)) {
    box_r.fail("at most 20 interval parameters are supported");
  }
  const int m = static_cast<int>(lo.size());

  const Reader bases_r = r.at("bases");
  const std::size_t count = bases_r.array_size();
  if (count == 0) bases_r.fail("need at least one base matrix");
  if (r.has("N") && r.at("N").integer(1, 1 << 20) != static_cast<int>(count)) {
    r.at("N").fail("does not match the number of bases");
  }
  std::vector<PolynomialMatrix> bases;
  for (std::size_t i = 0; i < count; ++i) {
    const Reader base = bases_r.at(i);
    if (base.array_size() != static_cast<std::size_t>(l + 1)) {
      base.fail("expected l+1 = " + std::to_string(l + 1) + " degree blocks");
    }
    std::vector<RealMatrix> blocks;
    for (int k = 0; k <= l; ++k) blocks.push_back(base.at(static_cast<std::size_t>(k)).matrix(n, n, scale));
    bases.emplace_back(std::move(blocks));
  }

  const Reader coeffs_r = r.at("coefficients");
  if (coeffs_r.array_size() != count) coeffs_r.fail("need one coefficient function per base");
  std::vector<MultilinearScalar> coeffs;
  for (std::size_t i = 0; i < count; ++i) {
    const Reader terms_r = coeffs_r.at(i);
    std::vector<MultilinearTerm> terms;
    for (std::size_t t = 0; t < terms_r.array_size(); ++t) {
      const Reader term = terms_r.at(t);
      MultilinearTerm mt;
      const Reader subset = term.at("subset");
      for (std::size_t s = 0; s < subset.array_size(); ++s) {
        mt.subset.push_back(subset.at(s).integer(1, m) - 1);
      }
      mt.coef = term.at("coef").number();
      terms.push_back(std::move(mt));
    }
    try {
      coeffs.emplace_back(m, std::move(terms));
    } catch (const std::invalid_argument& e) {
      terms_r.fail(e.what());
    }
  }
  return MultilinearFamily(std::move(bases), std::move(coeffs), ParameterBox(lo, hi));
}

inline PolytopicFamily parse_polytopic(const Reader& r) {
  const int n = r.at("n").integer(1, 64);
  const int degree = r.at("degree").integer(0, 64);
  const double scale = r.has("scale") ? r.at("scale").number() : 1.0;
  const Reader rows = r.at("entries");
  if (rows.array_size() != static_cast<std::size_t>(n)) rows.fail("expected n rows");
  std::vector<std::vector<Polynomial>> entries;
  std::size_t m = 0;
  for (int i = 0; i < n; ++i) {
    const Reader row = rows.at(static_cast<std::size_t>(i));
    if (row.array_size() != static_cast<std::size_t>(n)) row.fail("expected n entries");
    for (int j = 0; j < n; ++j) {
      const Reader vertices = row.at(static_cast<std::size_t>(j));
      const std::size_t count = vertices.array_size();
      if (count == 0) vertices.fail("entry needs at least one vertex polynomial");
      if (m == 0) m = count;
      if (count != m) vertices.fail("every entry needs the same number of vertices");
      std::vector<Polynomial> list;
      for (std::size_t k = 0; k < count; ++k) {
        const Reader poly = vertices.at(k);
        const std::size_t len = poly.array_size();
        if (len == 0 || len > static_cast<std::size_t>(degree + 1)) {
          poly.fail("expected 1.." + std::to_string(degree + 1) + " ascending coefficients");
        }
        std::vector<double> c;
        for (std::size_t d = 0; d < len; ++d) c.push_back(scale * poly.at(d).number());
        list.emplace_back(std::move(c));
      }
      entries.push_back(std::move(list));
    }
  }
  return PolytopicFamily(n, degree, std::move(entries));
}

inline void parse_solver(const Reader& r, SolverSettings& s) {
  if (r.has("margin_tol")) {
    s.options.margin_tol = r.at("margin_tol").number();
    if (!(s.options.margin_tol > 0.0)) r.at("margin_tol").fail("must be positive");
  }
  if (r.has("max_iter")) s.options.max_iter = r.at("max_iter").integer(1, 1'000'000);
  if (r.has("seed")) s.options.seed = r.at("seed").unsigned_integer();
  if (r.has("shared_p")) s.shared_p = r.at("shared_p").boolean();
}

inline void parse_plan(const Reader& r, SamplePlan& p) {
  if (r.has("include_corners")) p.include_corners = r.at("include_corners").boolean();
  if (r.has("grid_per_axis")) p.grid_per_axis = r.at("grid_per_axis").integer(0, 1'000'000);
  if (r.has("random_count")) p.random_count = r.at("random_count").integer(0, 1'000'000);
  if (r.has("seed")) p.seed = r.at("seed").unsigned_integer();
  if (r.has("edge_density")) p.edge_density = r.at("edge_density").integer(0, 1'000'000);
}

inline Json matrix_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace internal

inline ProblemFile parse_problem(const Json& j) {
  const internal::Reader root(j, "");
  if (!j.is_object()) root.fail("expected a JSON object");
  ProblemFile pf;
  pf.region = internal::parse_region(root.at("region"));
  const internal::Reader fam = root.at("family");
  const std::string kind = fam.at("kind").string();
  try {
    if (kind == "multilinear") {
      pf.family = internal::parse_multilinear(fam);
    } else if (kind == "polytopic") {
      pf.family = internal::parse_polytopic(fam);
    } else {
      fam.at("kind").fail("unknown family kind \"" + kind + "\"");
    }
  } catch (const std::invalid_argument& e) {
    fam.fail(e.what());
  }
  if (root.has("solver")) internal::parse_solver(root.at("solver"), pf.solver);
  if (root.has("plan")) internal::parse_plan(root.at("plan"), pf.plan);
  return pf;
}

inline ProblemFile parse_problem_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ProblemError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_problem(j);
}

inline ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemError("", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str());
}

inline Json to_json(const LmiRegion& r) {
  switch (r.kind()) {
    case LmiRegion::Kind::kLeftHalfPlane:
      return {{"type", "lhp"}};
    case LmiRegion::Kind::kUnitDisk:
      return {{"type", "disk"}};
    case LmiRegion::Kind::kCustom:
      break;
  }
  return {{"type", "custom"}, {"B", internal::matrix_json(r.b())}};
}

inline Json to_json(const MultilinearFamily& f) {
  Json bases = Json::array();
  for (const PolynomialMatrix& p : f.bases) {
    Json blocks = Json::array();
    for (const RealMatrix& b : p.blocks()) blocks.push_back(internal::matrix_json(b));
    bases.push_back(std::move(blocks));
  }
  Json coeffs = Json::array();
  for (const MultilinearScalar& a : f.coeffs) {
    Json terms = Json::array();
    for (const MultilinearTerm& t : a.terms()) {
      Json subset = Json::array();
      for (int idx : t.subset) subset.push_back(idx + 1);
      terms.push_back({{"subset", std::move(subset)}, {"coef", t.coef}});
    }
    coeffs.push_back(std::move(terms));
  }
  Json box = Json::array();
  for (std::size_t i = 0; i < f.box.lo.size(); ++i) box.push_back({f.box.lo[i], f.box.hi[i]});
  return {{"kind", "multilinear"}, {"n", f.n()},        {"l", f.degree()},
          {"N", f.bases.size()},   {"bases", bases},     {"coefficients", coeffs},
          {"box", box}};
}

inline Json to_json(const PolytopicFamily& f) {
  Json rows = Json::array();
  for (int i = 0; i < f.n; ++i) {
    Json row = Json::array();
    for (int j = 0; j < f.n; ++j) {
      Json vertices = Json::array();
      for (const Polynomial& p : f.entries[static_cast<std::size_t>(i * f.n + j)]) {
        vertices.push_back(p.coeffs);
      }
      row.push_back(std::move(vertices));
    }
    rows.push_back(std::move(row));
  }
  return {{"kind", "polytopic"}, {"n", f.n}, {"degree", f.degree}, {"entries", rows}};
}

inline Json to_json(const ProblemFile& pf) {
  Json j;
  j["region"] = to_json(pf.region);
  j["family"] = std::visit([](const auto& f) { return to_json(f); }, pf.family);
  j["solver"] = {{"margin_tol", pf.solver.options.margin_tol},
                 {"max_iter", pf.solver.options.max_iter},
                 {"seed", pf.solver.options.seed},
                 {"shared_p", pf.solver.shared_p}};
  j["plan"] = {{"include_corners", pf.plan.include_corners},
               {"grid_per_axis", pf.plan.grid_per_axis},
               {"random_count", pf.plan.random_count},
               {"seed", pf.plan.seed},
               {"edge_density", pf.plan.edge_density}};
  return j;
}

}  // namespace dstab
