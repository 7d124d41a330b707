#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "fuzzystab/pipeline.hpp"
#include "fuzzystab/scenario.hpp"
#include "fuzzystab/verifier.hpp"

using namespace fuzzystab;
namespace fs = std::filesystem;

namespace {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void criterion_line(int index, const char* what, bool pass) {
  std::printf("criterion %d (%s): %s\n", index, what, pass ? "PASS" : "FAIL");
  std::fflush(stdout);
}

Scenario load_scenario(const std::string& name) {
  return parse_scenario_file(std::string(FUZZYSTAB_SCENARIO_DIR) + "/" + name + ".json");
}

const RunReport& cached_run(const std::string& name, PipelineVerb verb) {
  static std::map<std::string, RunReport> cache;
  const std::string key = name + "/" + std::to_string(static_cast<int>(verb));
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, run_pipeline(load_scenario(name), verb)).first;
  return it->second;
}

const DefectReport& defect_by_kind(const RunReport& report, DefectKind kind) {
  for (const auto& d : report.defects)
    if (d.kind == kind) return d;
  throw std::runtime_error("missing defect kind in report");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ElementMap sqrt_perturbed_identity(const AlgebraPtr& r) {
  return [r](const Element& x) {
    const double v = x.coeffs()[0];
    return r->element({v + 0.1 * std::sqrt(std::abs(v))});
  };
}

}  // namespace

TEST_CASE("criterion 1: axiom suite on the default grid") {
  Timer timer;
  const AlgebraPtr alg = make_matrix_algebra(2);
  const SampleGrid grid = SampleGrid::defaults(alg, 2024);
  const AxiomReport ratio = check_axioms(FuzzyNorm::ratio_induced(alg), grid);
  const AxiomReport indicator = check_axioms(FuzzyNorm::crisp_indicator(alg), grid);
  const double elapsed = timer.seconds();

  bool pass = ratio.all_pass() && indicator.all_pass();
  pass = pass && grid.thresholds.size() == 7 && grid.points.size() >= 40;
  pass = pass && ratio.scalar_count == 8 && elapsed < 1.0;
  criterion_line(1, "N1-N5 for ratio and indicator norms, 7x>=40x8 grid, <1s", pass);

  CHECK(ratio.all_pass());
  CHECK(indicator.all_pass());
  CHECK(grid.points.size() >= 40);
  CHECK(grid.thresholds.size() == 7);
  CHECK(ratio.scalar_count == 8);
  CHECK(elapsed < 1.0);
}

TEST_CASE("criterion 2: algebra condition for the indicator norm over 2x2 matrices") {
  Timer timer;
  const AlgebraPtr alg = make_matrix_algebra(2, CrispNormKind::OperatorLeftRegular);
  const SampleGrid grid = SampleGrid::defaults(alg, 2024);
  const AlgebraConditionReport report =
      check_algebra_condition(FuzzyNorm::crisp_indicator(alg), *alg, grid);
  const double elapsed = timer.seconds();

  const bool pass = report.pass && report.violations == 0 && elapsed < 5.0;
  criterion_line(2, "N(xy,ab) >= min{N(x,a),N(y,b)} with operator norm, zero violations, <5s",
                 pass);

  CHECK(report.pass);
  CHECK(report.violations == 0);
  CHECK(elapsed < 5.0);
}

TEST_CASE("criterion 3: square-root perturbation on the reals meets the power-sum bound") {
  Timer timer;
  const AlgebraPtr r = make_matrix_algebra(1);
  const ElementMap f = sqrt_perturbed_identity(r);

  StabilizerConfig cfg;
  cfg.max_iters = 64;
  cfg.tol = 1e-300;  // run the full budget to observe the n = 64 iterate
  const Stabilizer stab(f, r, r, cfg);
  const Element one = r->element({1.0});
  const ProbeResult res = stab.stabilize_point(one);

  const double bound = rassias_bound(0.1, 0.5, 1.0);
  const double bound_error = std::abs(bound - 0.34142135623730951);
  const double dist = crisp_norm(f(one) - res.recovered);
  const double iterate_error = std::abs(res.trajectory.back().coeffs()[0] - 1.0);
  const double elapsed = timer.seconds();

  const bool pass = bound_error <= 1e-6 && dist <= bound && iterate_error < 1e-10 &&
                    res.trajectory.size() == 65 && elapsed < 1.0;
  criterion_line(3, "recovered identity within 0.341421..., iterate error < 1e-10 at n=64, <1s",
                 pass);

  CHECK(bound_error <= 1e-6);
  CHECK(dist <= bound);
  CHECK(dist == doctest::Approx(0.1).epsilon(1e-6));
  REQUIRE(res.trajectory.size() == 65);
  CHECK(iterate_error < 1e-10);
  CHECK(elapsed < 1.0);

  // The same oracle drives the shipped scenario through the additive verb.
  const RunReport& report = cached_run("rassias_oracle", PipelineVerb::Stabilize);
  CHECK(report.exit_code == 0);
}

TEST_CASE("criterion 4: constant-control bound on the reals") {
  Timer timer;
  const RunReport& report = cached_run("constant_r", PipelineVerb::Run);
  const double elapsed = timer.seconds();

  bool pass = report.exit_code == 0;
  REQUIRE(report.bound.has_value());
  for (const auto& row : report.bound->rows) {
    pass = pass && row.fuzzy_slack >= 0.0;            // N(f-h, t) >= N'(0.2, t)
    pass = pass && row.crisp_bound == 0.2;            // 2 eps / (2 - alpha)
    pass = pass && row.crisp_dist <= 0.05;            // construction budget
  }
  pass = pass && elapsed < 1.0;
  criterion_line(4, "N(f-h,t) >= N'(0.2,t) everywhere, ||f-h|| <= 0.05 <= 0.2, <1s", pass);

  CHECK(report.exit_code == 0);
  CHECK(report.bound->pass);
  for (const auto& row : report.bound->rows) {
    CHECK(row.fuzzy_slack >= 0.0);
    CHECK(row.crisp_bound == 0.2);
    CHECK(row.crisp_dist <= 0.05);
  }
  CHECK(elapsed < 1.0);
}

TEST_CASE("criterion 5: homomorphism bootstrap on the 2x2 matrix scenario") {
  Timer timer;
  const RunReport& report = cached_run("matrix_hom", PipelineVerb::Run);
  const double elapsed = timer.seconds();

  const double additive = defect_by_kind(report, DefectKind::Additive).max_defect;
  const double carry = defect_by_kind(report, DefectKind::IntermediateHomProductCarry).max_defect;
  const double swap = defect_by_kind(report, DefectKind::IntermediateHomFactorSwap).max_defect;
  const double mult = defect_by_kind(report, DefectKind::Multiplicative).max_defect;

  const bool pass = report.exit_code == 0 && additive <= 1e-6 && carry <= 1e-6 &&
                    swap <= 1e-6 && mult <= 1e-6 && elapsed < 30.0;
  criterion_line(5, "additive, product-carry, factor-swap, multiplicative defects <= 1e-6, <30s",
                 pass);

  CHECK(report.exit_code == 0);
  CHECK(additive <= 1e-6);
  CHECK(carry <= 1e-6);
  CHECK(swap <= 1e-6);
  CHECK(mult <= 1e-6);
  CHECK(elapsed < 30.0);
}

TEST_CASE("criterion 6: derivation bootstrap on the truncated polynomial algebra") {
  Timer timer;
  const RunReport& report = cached_run("poly_derivation", PipelineVerb::Run);
  const double elapsed = timer.seconds();

  const double leibniz = defect_by_kind(report, DefectKind::Leibniz).max_defect;
  REQUIRE(report.bound.has_value());
  bool fuzzy_ok = report.bound->pass;
  for (const auto& row : report.bound->rows) fuzzy_ok = fuzzy_ok && row.fuzzy_slack >= 0.0;

  const bool pass = report.exit_code == 0 && leibniz <= 1e-6 && fuzzy_ok && elapsed < 10.0;
  criterion_line(6, "Leibniz defect <= 1e-6 and N(f-d,t) >= N'(2phi/(2-alpha),t), <10s", pass);

  CHECK(report.exit_code == 0);
  CHECK(leibniz <= 1e-6);
  CHECK(fuzzy_ok);
  CHECK(elapsed < 10.0);
}

TEST_CASE("criterion 7: route agreement and the starved-budget sabotage") {
  // Scenario of criterion 3: compare the two construction routes directly.
  const AlgebraPtr r = make_matrix_algebra(1);
  const ElementMap f = sqrt_perturbed_identity(r);
  const SampleGrid grid = SampleGrid::defaults(r, 2024);
  StabilizerConfig dyadic;
  StabilizerConfig tripling;
  tripling.mode = StabilizerMode::LinearDiagnostic;
  const UniquenessReport oracle = check_uniqueness(
      f, r, r, grid.points, dyadic, tripling, FuzzyNorm::ratio_induced(r), grid.thresholds, 1e-4);

  bool pass = oracle.pass && oracle.max_crisp_diff <= 1e-4;

  // Scenarios 4-6 run the same comparison inside their pipelines; with the
  // pointwise indicator norms agreement realizes N(h - h', t) = 1 on the grid.
  for (const char* name : {"constant_r", "matrix_hom", "poly_derivation"}) {
    const RunReport& report = cached_run(name, PipelineVerb::Run);
    REQUIRE(report.uniqueness.has_value());
    pass = pass && report.uniqueness->pass;
    pass = pass && report.uniqueness->max_crisp_diff <= 1e-4;
    pass = pass && report.uniqueness->min_fuzzy == 1.0;
  }

  StabilizerConfig starved;
  starved.max_iters = 2;
  const UniquenessReport sabotage = check_uniqueness(
      f, r, r, grid.points, dyadic, starved, FuzzyNorm::ratio_induced(r), grid.thresholds, 1e-4);
  pass = pass && !sabotage.pass && sabotage.max_crisp_diff > 1e-4;

  criterion_line(7, "routes agree within 1e-4 on scenarios 3-6; max_iters=2 sabotage fails",
                 pass);

  CHECK(oracle.pass);
  CHECK(oracle.max_crisp_diff <= 1e-4);
  for (const char* name : {"constant_r", "matrix_hom", "poly_derivation"}) {
    const RunReport& report = cached_run(name, PipelineVerb::Run);
    CHECK(report.uniqueness->pass);
    CHECK(report.uniqueness->max_crisp_diff <= 1e-4);
    CHECK(report.uniqueness->min_fuzzy == 1.0);
  }
  CHECK(!sabotage.pass);
  CHECK(sabotage.max_crisp_diff > 1e-4);
}

TEST_CASE("criterion 8: superlinear reverse iteration") {
  const AlgebraPtr r = make_matrix_algebra(1);
  const ElementMap f = [r](const Element& x) {
    const double v = x.coeffs()[0];
    return r->element({v + 0.1 * v * v});
  };
  StabilizerConfig cfg;
  cfg.mode = StabilizerMode::Superlinear;
  cfg.max_iters = 64;
  const Stabilizer stab(f, r, r, cfg);
  const ProbeResult res = stab.stabilize_point(r->element({1.0}));

  bool pass = res.converged && res.iters_used <= 64 && res.residual <= 1e-10 &&
              std::abs(res.recovered.coeffs()[0] - 1.0) <= 1e-10;

  const RunReport& report = cached_run("superlinear", PipelineVerb::Stabilize);
  pass = pass && report.exit_code == 0;
  criterion_line(8, "x + 0.1 x^2 stabilizes to the identity with residual <= 1e-10 by n=64",
                 pass);

  CHECK(res.converged);
  CHECK(res.residual <= 1e-10);
  CHECK(std::abs(res.recovered.coeffs()[0] - 1.0) <= 1e-10);
  CHECK(report.exit_code == 0);
}

TEST_CASE("criterion 9: byte-identical numeric report fields across executions") {
  const fs::path base = fs::temp_directory_path() / "fuzzystab_acceptance";
  fs::remove_all(base);

  bool pass = true;
  for (const char* name : {"powersum_r", "matrix_hom"}) {
    const fs::path dir_a = base / (std::string(name) + "_a");
    const fs::path dir_b = base / (std::string(name) + "_b");
    emit_report(run_pipeline(load_scenario(name), PipelineVerb::Run), dir_a);
    emit_report(run_pipeline(load_scenario(name), PipelineVerb::Run), dir_b);

    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(dir_a)) {
      const std::string file = entry.path().filename().string();
      if (file == "summary.txt") continue;  // carries timings
      const bool same = slurp(entry.path()) == slurp(dir_b / file);
      CHECK_MESSAGE(same, name, "/", file);
      pass = pass && same;
      ++compared;
    }
    CHECK(compared >= 10);
    pass = pass && compared >= 10;
  }
  criterion_line(9, "two executions hash identically over all numeric tables", pass);
}
