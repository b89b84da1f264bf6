#include <string>
#include <variant>

#include <gtest/gtest.h>

#include "dstab/problem.hpp"
#include "test_support.hpp"

namespace dstab {
namespace {

using testing::problem_path;

std::string error_location(const std::string& text) {
  try {
    parse_problem_text(text);
  } catch (const ProblemError& e) {
    return e.where();
  }
  return "<no error>";
}

const char* kToy = R"({
  "region": {"type": "lhp"},
  "family": {"kind": "multilinear", "n": 1, "l": 1,
             "bases": [[[[0]], [[1]]], [[[-1]], [[0]]]],
             "coefficients": [[{"subset": [], "coef": 1}], [{"subset": [1], "coef": 1}]],
             "box": [[1, 2]]}
})";

TEST(ParseProblemTest, Example1) {
  const ProblemFile pf = load_problem(problem_path("example1.json"));
  EXPECT_EQ(pf.region.kind(), LmiRegion::Kind::kLeftHalfPlane);
  const auto& f = std::get<MultilinearFamily>(pf.family);
  EXPECT_EQ(f.n(), 1);
  EXPECT_EQ(f.degree(), 3);
  EXPECT_EQ(f.parameter_count(), 3);
  EXPECT_EQ(f.bases.size(), 2u);
  const MultilinearFamily oracle = testing::example1_family();
  for (const auto& q : corners(f.box)) {
    EXPECT_EQ(member_at(f, q), member_at(oracle, q));
  }
}

TEST(ParseProblemTest, Example2ScaleApplied) {
  const ProblemFile pf = load_problem(problem_path("example2.json"));
  EXPECT_EQ(pf.region.kind(), LmiRegion::Kind::kUnitDisk);
  const auto& f = std::get<MultilinearFamily>(pf.family);
  EXPECT_EQ(f.n(), 3);
  EXPECT_EQ(f.degree(), 3);
  EXPECT_EQ(f.box, ParameterBox({1, 2.1, 1.5}, {1.2, 2.4, 1.8}));
  // Stored as 15 and 2.7, scaled by 0.1 at load.
  EXPECT_DOUBLE_EQ(f.bases[0].block(3)(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(f.bases[0].block(3)(0, 2), 0.27);
  EXPECT_EQ(f.bases[0].block(3)(2, 0), 0);
}

TEST(ParseProblemTest, DefaultsAndOverrides) {
  const ProblemFile pf = parse_problem_text(kToy);
  EXPECT_EQ(pf.plan, default_plan());
  EXPECT_EQ(pf.solver.options.margin_tol, 1e-7);
  EXPECT_FALSE(pf.solver.shared_p);

  Json j = Json::parse(kToy);
  j["solver"] = {{"margin_tol", 1e-5}, {"shared_p", true}, {"max_iter", 50}};
  j["plan"] = {{"grid_per_axis", 0}, {"random_count", 7}, {"seed", 3}};
  const ProblemFile custom = parse_problem(j);
  EXPECT_EQ(custom.solver.options.margin_tol, 1e-5);
  EXPECT_TRUE(custom.solver.shared_p);
  EXPECT_EQ(custom.solver.options.max_iter, 50);
  EXPECT_EQ(custom.plan.random_count, 7);
  EXPECT_EQ(custom.plan.seed, 3u);
}

TEST(ParseProblemTest, RoundTripsShippedFiles) {
  for (const char* name : {"example1.json", "example2.json", "unstable_toy.json",
                           "polytopic_stable.json", "polytopic_unstable.json"}) {
    const ProblemFile pf = load_problem(problem_path(name));
    const Json once = to_json(pf);
    const Json twice = to_json(parse_problem(once));
    EXPECT_EQ(once, twice) << name;
  }
}

TEST(ParseProblemTest, ErrorLocations) {
  EXPECT_EQ(error_location("{"), "");
  EXPECT_EQ(error_location("[]"), "");
  EXPECT_EQ(error_location(R"({"family": {}})"), "");

  Json j = Json::parse(kToy);
  j["region"]["type"] = "ellipse";
  EXPECT_EQ(error_location(j.dump()), "/region/type");

  j = Json::parse(kToy);
  j["family"]["bases"][1][0] = {{1, 2}};
  EXPECT_EQ(error_location(j.dump()), "/family/bases/1/0/0");

  j = Json::parse(kToy);
  j["family"]["coefficients"][1][0]["subset"] = {2};
  EXPECT_EQ(error_location(j.dump()), "/family/coefficients/1/0/subset/0");

  j = Json::parse(kToy);
  j["family"]["box"][0] = {3, 2};
  EXPECT_EQ(error_location(j.dump()), "/family/box/0");

  j = Json::parse(kToy);
  j["family"]["coefficients"][1][0]["coef"] = "x";
  EXPECT_EQ(error_location(j.dump()), "/family/coefficients/1/0/coef");

  j = Json::parse(kToy);
  j["plan"] = {{"random_count", -1}};
  EXPECT_EQ(error_location(j.dump()), "/plan/random_count");

  j = Json::parse(kToy);
  j["region"] = {{"type", "custom"}, {"B", {{0, 1}, {2, 0}}}};
  EXPECT_EQ(error_location(j.dump()), "/region/B");
}

TEST(ParseProblemTest, PolytopicErrors) {
  Json j = to_json(load_problem(problem_path("polytopic_stable.json")));
  j["family"]["entries"][1][0].push_back({0.0});
  EXPECT_EQ(error_location(j.dump()), "/family/entries/1/0");

  j = to_json(load_problem(problem_path("polytopic_stable.json")));
  j["family"]["entries"][0][0][0] = {1, 2, 3};
  EXPECT_EQ(error_location(j.dump()), "/family/entries/0/0/0");
}

TEST(ParseProblemTest, MissingFile) {
  EXPECT_THROW(load_problem(problem_path("does_not_exist.json")), ProblemError);
}

}  // namespace
}  // namespace dstab
