#ifndef FUZZYSTAB_PIPELINE_HPP
#define FUZZYSTAB_PIPELINE_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fuzzystab/scenario.hpp"
#include "fuzzystab/verifier.hpp"

namespace fuzzystab {

enum class PipelineVerb { Axioms, Stabilize, Verify, Run };

/// Stage identifiers double as process exit codes (0 = all pass).
enum class StageCode : int {
  Ok = 0,
  Usage = 1,
  Parse = 2,
  AxiomsStage = 3,
  AlgebraCondition = 4,
  Scaling = 5,
  Domination = 6,
  Stabilize = 7,
  Defects = 8,
  Bound = 9,
  Uniqueness = 10,
};

struct StageStatus {
  std::string name;
  bool ran = false;
  bool pass = false;
  bool skipped = false;
  double millis = 0.0;
  std::string detail;
};

struct TrajectoryCert {
  bool limit_pass = false;
  bool cauchy_pass = false;
};

struct RunReport {
  nlohmann::json scenario_echo;
  PipelineVerb verb = PipelineVerb::Run;

  std::optional<AxiomReport> axioms;          // codomain norm N
  std::optional<AxiomReport> control_axioms;  // N', when its kind differs
  std::optional<AlgebraConditionReport> algebra_condition;
  std::optional<ScalingReport> scaling;
  std::optional<DominationReport> domination;
  double effective_noise_scale = 0.0;
  std::optional<StabilizationResult> stabilization;
  std::vector<TrajectoryCert> trajectory_certs;  // per probe
  std::vector<DefectReport> defects;
  bool defect_gate_pass = true;   // recovered-map identities within 100*tol
  bool chain_pass = true;         // intermediate bounds imply the product bound
  std::optional<BoundCheckReport> bound;
  std::optional<UniquenessReport> uniqueness;

  std::vector<StageStatus> stages;
  int exit_code = 0;
  std::string failure_detail;
};

/// Runs the stages selected by the verb in fixed order, short-circuiting when
/// a precondition stage (axioms, algebra condition, scaling, domination,
/// stabilize) fails:
///   axioms:    check_axioms, check_algebra_condition
///   stabilize: check_scaling, additive domination, stabilize, additive
///              defect, stability bound
///   verify:    check_scaling .. check_uniqueness (no norm validation)
///   run:       everything
RunReport run_pipeline(const Scenario& scenario, PipelineVerb verb = PipelineVerb::Run);

/// Writes the human-readable summary, one delimiter-separated table per
/// report kind (17-significant-digit decimals, rows in grid order) and the
/// resolved scenario echo. Numeric table content is byte-identical across
/// re-runs of the same scenario; timings appear only in the summary.
void emit_report(const RunReport& report, const std::filesystem::path& dir);

}  // namespace fuzzystab

#endif
