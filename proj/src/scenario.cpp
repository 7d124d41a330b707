#include "fuzzystab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fuzzystab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) fail("unknown field '" + path + it.key() + "'");
  }
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.at(key).is_number()) fail("field '" + path + key + "' must be a number");
  return obj.at(key).get<double>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.at(key).is_string()) fail("field '" + path + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

CrispNormKind parse_crisp_norm(const std::string& s, const std::string& path) {
  if (s == "sup") return CrispNormKind::SupCoefficient;
  if (s == "euclidean") return CrispNormKind::EuclideanCoefficient;
  if (s == "operator") return CrispNormKind::OperatorLeftRegular;
  fail("field '" + path + "' must be one of sup|euclidean|operator, got '" + s + "'");
}

std::string crisp_norm_name(CrispNormKind k) {
  switch (k) {
    case CrispNormKind::SupCoefficient: return "sup";
    case CrispNormKind::EuclideanCoefficient: return "euclidean";
    case CrispNormKind::OperatorLeftRegular: return "operator";
  }
  return "sup";
}

FuzzyNormKind parse_fuzzy_kind(const std::string& s, const std::string& path) {
  if (s == "ratio") return FuzzyNormKind::RatioInduced;
  if (s == "indicator") return FuzzyNormKind::CrispIndicator;
  if (s == "level_family") return FuzzyNormKind::LevelFamily;
  fail("field '" + path + "' must be one of ratio|indicator|level_family, got '" + s + "'");
}

std::string fuzzy_kind_name(FuzzyNormKind k) {
  switch (k) {
    case FuzzyNormKind::RatioInduced: return "ratio";
    case FuzzyNormKind::CrispIndicator: return "indicator";
    case FuzzyNormKind::LevelFamily: return "level_family";
  }
  return "ratio";
}

StabilizerMode parse_mode(const std::string& s, const std::string& path) {
  if (s == "dyadic") return StabilizerMode::Dyadic;
  if (s == "linear_diagnostic") return StabilizerMode::LinearDiagnostic;
  if (s == "superlinear") return StabilizerMode::Superlinear;
  fail("field '" + path + "' must be one of dyadic|linear_diagnostic|superlinear, got '" + s +
       "'");
}

std::string mode_name(StabilizerMode m) {
  switch (m) {
    case StabilizerMode::Dyadic: return "dyadic";
    case StabilizerMode::LinearDiagnostic: return "linear_diagnostic";
    case StabilizerMode::Superlinear: return "superlinear";
  }
  return "dyadic";
}

AlgebraSpec parse_algebra(const json& obj) {
  AlgebraSpec spec;
  reject_unknown(obj, "algebra.", {"kind", "size", "dim", "structure_constants", "norm", "label"});
  spec.kind = get_string(obj, "algebra.", "kind");
  if (obj.contains("norm")) spec.norm = parse_crisp_norm(get_string(obj, "algebra.", "norm"), "algebra.norm");
  if (obj.contains("label")) spec.label = get_string(obj, "algebra.", "label");
  if (spec.kind == "matrix" || spec.kind == "poly_trunc") {
    if (!obj.contains("size")) fail("field 'algebra.size' is required for kind '" + spec.kind + "'");
    const double sz = get_number(obj, "algebra.", "size");
    if (sz < 1 || sz != std::floor(sz)) fail("field 'algebra.size' must be a positive integer");
    spec.size = static_cast<std::size_t>(sz);
  } else if (spec.kind == "custom") {
    if (!obj.contains("dim") || !obj.contains("structure_constants"))
      fail("custom algebra requires 'algebra.dim' and 'algebra.structure_constants'");
    const double d = get_number(obj, "algebra.", "dim");
    if (d < 1 || d != std::floor(d)) fail("field 'algebra.dim' must be a positive integer");
    spec.dim = static_cast<std::size_t>(d);
    if (!obj.at("structure_constants").is_array())
      fail("field 'algebra.structure_constants' must be an array");
    for (const auto& v : obj.at("structure_constants")) {
      if (!v.is_number()) fail("field 'algebra.structure_constants' must contain numbers");
      spec.structure_constants.push_back(v.get<double>());
    }
  } else {
    fail("field 'algebra.kind' must be one of matrix|poly_trunc|custom, got '" + spec.kind + "'");
  }
  return spec;
}

NormSpec parse_norm(const json& obj, const std::string& path) {
  NormSpec spec;
  reject_unknown(obj, path + ".", {"kind", "levels"});
  spec.kind = parse_fuzzy_kind(get_string(obj, path + ".", "kind"), path + ".kind");
  if (spec.kind == FuzzyNormKind::LevelFamily) {
    if (!obj.contains("levels")) fail("field '" + path + ".levels' is required for level_family");
    if (!obj.at("levels").is_array()) fail("field '" + path + ".levels' must be an array");
    for (const auto& entry : obj.at("levels")) {
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number())
        fail("field '" + path + ".levels' entries must be [level, scale] pairs");
      spec.levels.push_back({entry[0].get<double>(), entry[1].get<double>()});
    }
  } else if (obj.contains("levels")) {
    fail("field '" + path + ".levels' applies only to level_family norms");
  }
  return spec;
}

ControlSpec parse_control(const json& obj) {
  ControlSpec spec;
  reject_unknown(obj, "control.", {"kind", "eps", "p", "alpha"});
  const std::string kind = get_string(obj, "control.", "kind");
  if (kind == "constant") {
    spec.kind = ControlKind::Constant;
  } else if (kind == "powersum") {
    spec.kind = ControlKind::PowerSum;
    if (!obj.contains("p")) fail("field 'control.p' is required for powersum controls");
  } else {
    fail("field 'control.kind' must be constant|powersum, got '" + kind + "'");
  }
  if (!obj.contains("eps")) fail("field 'control.eps' is required");
  spec.eps = get_number(obj, "control.", "eps");
  if (obj.contains("p")) spec.p = get_number(obj, "control.", "p");
  if (obj.contains("alpha")) spec.alpha = get_number(obj, "control.", "alpha");
  return spec;
}

PerturbationSpec parse_perturbation(const json& obj) {
  PerturbationSpec spec;
  reject_unknown(obj, "perturbation.",
                 {"seed", "noise_scale", "mode", "base", "inner_index", "direction"});
  if (!obj.contains("mode")) fail("field 'perturbation.mode' is required");
  const std::string mode = get_string(obj, "perturbation.", "mode");
  if (mode == "homomorphism") spec.mode = PerturbMode::Homomorphism;
  else if (mode == "derivation") spec.mode = PerturbMode::Derivation;
  else fail("field 'perturbation.mode' must be homomorphism|derivation, got '" + mode + "'");
  if (obj.contains("seed")) {
    if (!obj.at("seed").is_number_unsigned() && !obj.at("seed").is_number_integer())
      fail("field 'perturbation.seed' must be an integer");
    spec.seed = obj.at("seed").get<std::uint64_t>();
  }
  if (obj.contains("noise_scale")) spec.noise_scale = get_number(obj, "perturbation.", "noise_scale");
  if (obj.contains("base")) {
    spec.base = get_string(obj, "perturbation.", "base");
    if (spec.base != "identity" && spec.base != "euler" && spec.base != "inner")
      fail("field 'perturbation.base' must be identity|euler|inner, got '" + spec.base + "'");
  } else if (spec.mode == PerturbMode::Derivation) {
    spec.base = "euler";
  }
  if (obj.contains("inner_index")) {
    const double v = get_number(obj, "perturbation.", "inner_index");
    if (v < 0 || v != std::floor(v)) fail("field 'perturbation.inner_index' must be a nonnegative integer");
    spec.inner_index = static_cast<std::size_t>(v);
  }
  if (obj.contains("direction")) {
    const std::string dir = get_string(obj, "perturbation.", "direction");
    if (dir == "hashed") spec.direction = NoiseDirection::Hashed;
    else if (dir == "fixed") spec.direction = NoiseDirection::Fixed;
    else fail("field 'perturbation.direction' must be hashed|fixed, got '" + dir + "'");
  }
  return spec;
}

StabilizerConfig parse_stabilizer(const json& obj) {
  StabilizerConfig cfg;
  reject_unknown(obj, "stabilizer.", {"mode", "max_iters", "tol", "overflow_cap", "fuzzy_delta"});
  if (obj.contains("mode")) cfg.mode = parse_mode(get_string(obj, "stabilizer.", "mode"), "stabilizer.mode");
  if (obj.contains("max_iters")) {
    const double v = get_number(obj, "stabilizer.", "max_iters");
    if (v < 1 || v != std::floor(v)) fail("field 'stabilizer.max_iters' must be a positive integer");
    cfg.max_iters = static_cast<int>(v);
  }
  if (obj.contains("tol")) cfg.tol = get_number(obj, "stabilizer.", "tol");
  if (obj.contains("overflow_cap")) cfg.overflow_cap = get_number(obj, "stabilizer.", "overflow_cap");
  if (obj.contains("fuzzy_delta")) cfg.fuzzy_delta = get_number(obj, "stabilizer.", "fuzzy_delta");
  cfg.validate();
  return cfg;
}

GridSpec parse_grid(const json& obj) {
  GridSpec spec;
  reject_unknown(obj, "grid.", {"thresholds", "random_points", "probe_seed", "scalars"});
  if (obj.contains("thresholds")) {
    spec.thresholds.clear();
    for (const auto& v : obj.at("thresholds")) {
      if (!v.is_number()) fail("field 'grid.thresholds' must contain numbers");
      spec.thresholds.push_back(v.get<double>());
    }
  }
  if (obj.contains("random_points")) {
    const double v = get_number(obj, "grid.", "random_points");
    if (v < 0 || v != std::floor(v)) fail("field 'grid.random_points' must be a nonnegative integer");
    spec.random_points = static_cast<std::size_t>(v);
  }
  if (obj.contains("probe_seed")) {
    if (!obj.at("probe_seed").is_number_unsigned() && !obj.at("probe_seed").is_number_integer())
      fail("field 'grid.probe_seed' must be an integer");
    spec.probe_seed = obj.at("probe_seed").get<std::uint64_t>();
  }
  if (obj.contains("scalars")) {
    spec.scalars.clear();
    for (const auto& v : obj.at("scalars")) {
      if (!v.is_number()) fail("field 'grid.scalars' must contain numbers");
      spec.scalars.push_back(v.get<double>());
    }
  }
  return spec;
}

UniquenessSpec parse_uniqueness(const json& obj) {
  UniquenessSpec spec;
  reject_unknown(obj, "uniqueness.", {"delta", "alt_mode", "alt_max_iters"});
  if (obj.contains("delta")) spec.delta = get_number(obj, "uniqueness.", "delta");
  if (obj.contains("alt_mode"))
    spec.alt_mode = parse_mode(get_string(obj, "uniqueness.", "alt_mode"), "uniqueness.alt_mode");
  if (obj.contains("alt_max_iters")) {
    const double v = get_number(obj, "uniqueness.", "alt_max_iters");
    if (v < 1 || v != std::floor(v)) fail("field 'uniqueness.alt_max_iters' must be a positive integer");
    spec.alt_max_iters = static_cast<int>(v);
  }
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) fail("field 'uniqueness.delta' must lie in (0,1)");
  return spec;
}

constexpr double kAssocTolerance = 1e-10;

FuzzyNorm build_norm(const NormSpec& spec, const AlgebraPtr& alg) {
  switch (spec.kind) {
    case FuzzyNormKind::RatioInduced: return FuzzyNorm::ratio_induced(alg);
    case FuzzyNormKind::CrispIndicator: return FuzzyNorm::crisp_indicator(alg);
    case FuzzyNormKind::LevelFamily: return FuzzyNorm::level_family(alg, spec.levels);
  }
  fail("unknown fuzzy norm kind");
}

}  // namespace

ScenarioRuntime build_runtime(const Scenario& scenario) {
  AlgebraPtr alg;
  if (scenario.algebra.kind == "matrix") {
    alg = make_matrix_algebra(scenario.algebra.size, scenario.algebra.norm);
  } else if (scenario.algebra.kind == "poly_trunc") {
    alg = make_poly_trunc_algebra(scenario.algebra.size, scenario.algebra.norm);
  } else {
    alg = make_custom_algebra(scenario.algebra.dim, scenario.algebra.structure_constants,
                              scenario.algebra.norm,
                              scenario.algebra.label.empty() ? "custom" : scenario.algebra.label);
    const double residual = check_associativity(*alg);
    if (residual > kAssocTolerance)
      fail("custom algebra is not associative: residual " + std::to_string(residual));
  }

  FuzzyNorm codomain_norm = build_norm(scenario.norm, alg);
  FuzzyNorm control_norm = build_norm(scenario.control_norm.value_or(scenario.norm), alg);

  ControlFunction control =
      scenario.control.kind == ControlKind::Constant
          ? ControlFunction::constant(scenario.control.eps, alg, control_norm,
                                      scenario.control.alpha)
          : ControlFunction::power_sum(scenario.control.eps, scenario.control.p, alg,
                                       control_norm, scenario.control.alpha);
  validate_mode_for_control(control, scenario.stabilizer.mode);

  LinearMap base = LinearMap::identity(alg);
  if (scenario.perturbation.base == "euler") {
    base = LinearMap::euler_derivation(alg);
  } else if (scenario.perturbation.base == "inner") {
    if (scenario.perturbation.inner_index >= alg->dim())
      fail("perturbation.inner_index out of range");
    base = LinearMap::inner_derivation(alg, alg->basis_element(scenario.perturbation.inner_index));
  }

  ApproximateMap map(base, scenario.perturbation.seed, scenario.perturbation.noise_scale,
                     scenario.perturbation.mode, scenario.perturbation.direction, control,
                     codomain_norm);

  SampleGrid grid =
      SampleGrid::defaults(alg, scenario.grid.probe_seed, scenario.grid.random_points);
  grid.thresholds = scenario.grid.thresholds;
  grid.validate();

  return ScenarioRuntime{std::move(alg),  std::move(codomain_norm), std::move(control_norm),
                         std::move(control), std::move(base),       std::move(map),
                         std::move(grid)};
}

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) fail("scenario document must be a JSON object");

  std::vector<std::string> missing;
  for (const char* key : {"algebra", "norm", "control", "perturbation"})
    if (!doc.contains(key)) missing.emplace_back(key);
  if (!missing.empty()) {
    std::string msg = "scenario is missing required sections:";
    for (const auto& k : missing) msg += " '" + k + "'";
    msg += "; required fields: algebra.kind, norm.kind, control.kind, control.eps, perturbation.mode";
    fail(msg);
  }
  reject_unknown(doc, "",
                 {"algebra", "norm", "control_norm", "control", "perturbation", "stabilizer",
                  "grid", "uniqueness", "output"});

  Scenario s;
  s.algebra = parse_algebra(doc.at("algebra"));
  s.norm = parse_norm(doc.at("norm"), "norm");
  if (doc.contains("control_norm")) s.control_norm = parse_norm(doc.at("control_norm"), "control_norm");
  s.control = parse_control(doc.at("control"));
  s.perturbation = parse_perturbation(doc.at("perturbation"));
  if (doc.contains("stabilizer")) s.stabilizer = parse_stabilizer(doc.at("stabilizer"));
  if (doc.contains("grid")) s.grid = parse_grid(doc.at("grid"));
  if (doc.contains("uniqueness")) s.uniqueness = parse_uniqueness(doc.at("uniqueness"));
  if (doc.contains("output")) {
    reject_unknown(doc.at("output"), "output.", {"dir"});
    if (doc.at("output").contains("dir")) s.output_dir = get_string(doc.at("output"), "output.", "dir");
  }

  if (s.perturbation.mode == PerturbMode::Derivation && s.perturbation.base == "identity")
    fail("perturbation.base 'identity' is not a derivation; use euler or inner");
  if (s.perturbation.base == "euler" && s.algebra.kind != "poly_trunc")
    fail("perturbation.base 'euler' requires a poly_trunc algebra");

  // Constructing the runtime runs every module constructor; this is where
  // alpha ranges, level tables, associativity and mode compatibility are
  // enforced. The derived alpha is resolved into the echoed scenario.
  const ScenarioRuntime runtime = build_runtime(s);
  s.control.alpha = runtime.control.alpha();
  return s;
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("scenario parse error: ") + e.what());
  }
  return scenario_from_json(doc);
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    fail("--set expects key.path=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // plain strings may be given unquoted
  }

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) fail("--set path has an empty segment: '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

nlohmann::json Scenario::echo() const {
  json doc;
  doc["algebra"]["kind"] = algebra.kind;
  doc["algebra"]["norm"] = crisp_norm_name(algebra.norm);
  if (algebra.kind == "custom") {
    doc["algebra"]["dim"] = algebra.dim;
    doc["algebra"]["structure_constants"] = algebra.structure_constants;
    doc["algebra"]["label"] = algebra.label;
  } else {
    doc["algebra"]["size"] = algebra.size;
  }
  const auto norm_json = [](const NormSpec& n) {
    json j;
    j["kind"] = fuzzy_kind_name(n.kind);
    if (n.kind == FuzzyNormKind::LevelFamily) {
      json levels = json::array();
      for (const auto& [level, scale] : n.levels) levels.push_back({level, scale});
      j["levels"] = levels;
    }
    return j;
  };
  doc["norm"] = norm_json(norm);
  doc["control_norm"] = norm_json(control_norm.value_or(norm));
  doc["control"]["kind"] = control.kind == ControlKind::Constant ? "constant" : "powersum";
  doc["control"]["eps"] = control.eps;
  if (control.kind == ControlKind::PowerSum) doc["control"]["p"] = control.p;
  if (control.alpha) doc["control"]["alpha"] = *control.alpha;
  doc["perturbation"]["seed"] = perturbation.seed;
  doc["perturbation"]["noise_scale"] = perturbation.noise_scale;
  doc["perturbation"]["mode"] =
      perturbation.mode == PerturbMode::Homomorphism ? "homomorphism" : "derivation";
  doc["perturbation"]["base"] = perturbation.base;
  if (perturbation.base == "inner") doc["perturbation"]["inner_index"] = perturbation.inner_index;
  doc["perturbation"]["direction"] =
      perturbation.direction == NoiseDirection::Hashed ? "hashed" : "fixed";
  doc["stabilizer"]["mode"] = mode_name(stabilizer.mode);
  doc["stabilizer"]["max_iters"] = stabilizer.max_iters;
  doc["stabilizer"]["tol"] = stabilizer.tol;
  doc["stabilizer"]["overflow_cap"] = stabilizer.overflow_cap;
  doc["stabilizer"]["fuzzy_delta"] = stabilizer.fuzzy_delta;
  doc["grid"]["thresholds"] = grid.thresholds;
  doc["grid"]["random_points"] = grid.random_points;
  doc["grid"]["probe_seed"] = grid.probe_seed;
  doc["grid"]["scalars"] = grid.scalars;
  doc["uniqueness"]["delta"] = uniqueness.delta;
  doc["uniqueness"]["alt_mode"] = mode_name(uniqueness.alt_mode);
  doc["uniqueness"]["alt_max_iters"] = uniqueness.alt_max_iters;
  doc["output"]["dir"] = output_dir;
  return doc;
}

}  // namespace fuzzystab
