// dstab: certify robust D-stability of uncertain polynomial matrix families.
//
//   dstab analyze <file>    LMI certificate plus sampling cross-check
//   dstab sample <file>     sampling oracle only
//   dstab roots-csv <file>  root loci of the sampled members as CSV

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dstab/dstab.hpp"

namespace {

struct PlanFlags {
  std::optional<int> grid;
  std::optional<int> random;
  std::optional<int> edge_density;
  std::optional<std::uint64_t> seed;
  bool no_corners = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--grid", grid, "Grid points per parameter axis")->check(CLI::NonNegativeNumber);
    cmd->add_option("--random", random, "Uniform random samples")->check(CLI::NonNegativeNumber);
    cmd->add_option("--edge-density", edge_density, "Lambda steps per polytopic edge (0 = none)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", seed, "Seed for sampling and the solver (default: $DSTAB_SEED)");
    cmd->add_flag("--no-corners", no_corners, "Skip box corners / polytope vertices");
  }

  // Flag values win over $DSTAB_SEED, which wins over the problem file.
  void apply(dstab::ProblemFile& pf) const {
    if (grid) pf.plan.grid_per_axis = *grid;
    if (random) pf.plan.random_count = *random;
    if (edge_density) pf.plan.edge_density = *edge_density;
    if (no_corners) pf.plan.include_corners = false;
    std::optional<std::uint64_t> s = seed;
    if (!s) {
      if (const char* env = std::getenv("DSTAB_SEED")) {
        try {
          s = std::stoull(env);
        } catch (const std::exception&) {
          throw dstab::ProblemError("", std::string("DSTAB_SEED is not an integer: ") + env);
        }
      }
    }
    if (s) {
      pf.plan.seed = *s;
      pf.solver.options.seed = *s;
    }
  }
};

int run_analyze(const std::string& file, const PlanFlags& plan, std::optional<double> tol,
                std::optional<int> max_iter, bool no_oracle, bool shared_p, bool json) {
  dstab::ProblemFile pf = dstab::load_problem(file);
  plan.apply(pf);
  if (tol) pf.solver.options.margin_tol = *tol;
  if (max_iter) pf.solver.options.max_iter = *max_iter;
  if (shared_p) pf.solver.shared_p = true;
  const dstab::AnalysisResult result = dstab::analyze(pf, !no_oracle);
  if (json) {
    std::cout << dstab::analysis_json(result, pf).dump(2) << '\n';
  } else {
    std::cout << dstab::analysis_text(result, pf);
  }
  return result.exit_code;
}

int run_sample(const std::string& file, const PlanFlags& plan, bool json) {
  dstab::ProblemFile pf = dstab::load_problem(file);
  plan.apply(pf);
  const dstab::StabilityReport report = dstab::run_oracle(pf.family, pf.region, pf.plan);
  if (json) {
    std::cout << dstab::oracle_json(report).dump(2) << '\n';
  } else {
    std::cout << dstab::describe_oracle(report) << '\n';
  }
  return dstab::oracle_exit_code(report);
}

int run_roots_csv(const std::string& file, const PlanFlags& plan, const std::string& out_path) {
  dstab::ProblemFile pf = dstab::load_problem(file);
  plan.apply(pf);
  auto write = [&](std::ostream& os) {
    std::visit([&](const auto& f) { dstab::write_roots_csv(os, f, pf.plan); }, pf.family);
  };
  if (out_path.empty() || out_path == "-") {
    write(std::cout);
    return dstab::kExitCertified;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "dstab: cannot write " << out_path << '\n';
    return dstab::kExitInputError;
  }
  write(out);
  out.close();
  if (!out) {
    std::cerr << "dstab: error while writing " << out_path << '\n';
    return dstab::kExitInputError;
  }
  return dstab::kExitCertified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust D-stability certificates for uncertain polynomial matrix families"};
  app.require_subcommand(1);

  std::string file;
  PlanFlags plan;
  std::optional<double> tol;
  std::optional<int> max_iter;
  bool no_oracle = false;
  bool shared_p = false;
  bool json = false;
  std::string out_path;

  CLI::App* analyze = app.add_subcommand("analyze", "Solve the vertex LMIs and cross-check by sampling");
  analyze->add_option("file", file, "Problem file (JSON)")->required();
  analyze->add_option("--solver-tol", tol, "Minimum verified margin for a certificate")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--max-iter", max_iter, "Newton iteration budget")->check(CLI::PositiveNumber);
  analyze->add_flag("--no-oracle", no_oracle, "Skip the sampling cross-check");
  analyze->add_flag("--shared-p", shared_p, "Use one P for every vertex");
  analyze->add_flag("--json", json, "Print a JSON report");
  plan.add_to(analyze);

  CLI::App* sample = app.add_subcommand("sample", "Sampling oracle only");
  sample->add_option("file", file, "Problem file (JSON)")->required();
  sample->add_flag("--json", json, "Print a JSON report");
  plan.add_to(sample);

  CLI::App* roots = app.add_subcommand("roots-csv", "Write determinant root loci as CSV");
  roots->add_option("file", file, "Problem file (JSON)")->required();
  roots->add_option("-o,--output", out_path, "Output path (default: stdout)");
  plan.add_to(roots);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dstab::kExitInputError;
  }

  try {
    if (analyze->parsed()) return run_analyze(file, plan, tol, max_iter, no_oracle, shared_p, json);
    if (sample->parsed()) return run_sample(file, plan, json);
    return run_roots_csv(file, plan, out_path);
  } catch (const dstab::ProblemError& e) {
    std::cerr << "dstab: input error at " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "dstab: invalid input: " << e.what() << '\n';
  }
  return dstab::kExitInputError;
}
