#ifndef FUZZYSTAB_SCENARIO_HPP
#define FUZZYSTAB_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fuzzystab/control.hpp"
#include "fuzzystab/fuzzy_norm.hpp"
#include "fuzzystab/stabilizer.hpp"

#include <json.hpp>

namespace fuzzystab {

struct AlgebraSpec {
  std::string kind;  // "matrix" | "poly_trunc" | "custom"
  std::size_t size = 0;
  std::size_t dim = 0;                       // custom only
  std::vector<double> structure_constants;   // custom only, row-major dim^3
  CrispNormKind norm = CrispNormKind::SupCoefficient;
  std::string label;
};

struct NormSpec {
  FuzzyNormKind kind = FuzzyNormKind::RatioInduced;
  std::vector<LevelEntry> levels;  // level family only
};

struct ControlSpec {
  ControlKind kind = ControlKind::Constant;
  double eps = 0.0;
  double p = 0.0;
  std::optional<double> alpha;
};

struct PerturbationSpec {
  std::uint64_t seed = 42;
  double noise_scale = 0.0;
  PerturbMode mode = PerturbMode::Homomorphism;
  std::string base = "identity";  // "identity" | "euler" | "inner"
  std::size_t inner_index = 0;
  NoiseDirection direction = NoiseDirection::Hashed;
};

struct GridSpec {
  std::vector<double> thresholds = SampleGrid::default_thresholds();
  std::size_t random_points = 32;
  std::uint64_t probe_seed = 7;
  std::vector<double> scalars = default_scalars();
};

struct UniquenessSpec {
  double delta = 1e-4;
  StabilizerMode alt_mode = StabilizerMode::LinearDiagnostic;
  int alt_max_iters = 64;
};

/// Fully validated scenario with defaults resolved. `echo` is the resolved
/// configuration as a JSON document with sorted keys; re-emitting it is
/// byte-stable.
struct Scenario {
  AlgebraSpec algebra;
  NormSpec norm;
  std::optional<NormSpec> control_norm;  // defaults to `norm`
  ControlSpec control;
  PerturbationSpec perturbation;
  StabilizerConfig stabilizer;
  GridSpec grid;
  UniquenessSpec uniqueness;
  std::string output_dir = "report";

  nlohmann::json echo() const;
};

/// Module objects constructed from a validated scenario.
struct ScenarioRuntime {
  AlgebraPtr algebra;
  FuzzyNorm codomain_norm;   // N over the fuzzy Banach algebra
  FuzzyNorm control_norm;    // N' measuring the control function
  ControlFunction control;
  LinearMap base;
  ApproximateMap map;        // requested noise scale, not yet certified
  SampleGrid grid;
};

ScenarioRuntime build_runtime(const Scenario& scenario);

/// Parses and validates a scenario document. Unknown fields are rejected with
/// their full dotted path; missing required fields are listed together.
/// Validation constructs every referenced module object, so constructor
/// invariants (alpha range, level tables, associativity of custom structure
/// constants, mode/control compatibility) are enforced before any computation,
/// and derived defaults (the scaling factor alpha) are resolved into the
/// returned scenario.
Scenario parse_scenario(const std::string& text);
Scenario parse_scenario_file(const std::string& path);

/// Applies one `--set key=value` override (dotted path) to a raw document.
void apply_override(nlohmann::json& doc, const std::string& assignment);

Scenario scenario_from_json(const nlohmann::json& doc);

}  // namespace fuzzystab

#endif
