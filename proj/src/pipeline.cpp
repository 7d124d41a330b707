#include "fuzzystab/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fuzzystab {

namespace {

class StageClock {
 public:
  StageClock() : start_(std::chrono::steady_clock::now()) {}
  double millis() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

RunReport run_pipeline(const Scenario& scenario, PipelineVerb verb) {
  RunReport report;
  report.verb = verb;
  report.scenario_echo = scenario.echo();

  ScenarioRuntime rt = build_runtime(scenario);
  const bool want_norm_stages = verb == PipelineVerb::Axioms || verb == PipelineVerb::Run;
  const bool want_method_stages = verb != PipelineVerb::Axioms;
  const bool full_battery = verb == PipelineVerb::Verify || verb == PipelineVerb::Run;

  bool halted = false;
  const auto finish_stage = [&](StageStatus status, StageCode code) {
    status.ran = true;
    report.stages.push_back(status);
    if (!status.pass && report.exit_code == 0) {
      report.exit_code = static_cast<int>(code);
      report.failure_detail = status.name + ": " + status.detail;
    }
  };
  const auto skip_stage = [&](const std::string& name) {
    report.stages.push_back({.name = name, .skipped = true});
  };

  // Norm validation stages.
  if (want_norm_stages) {
    {
      StageClock clock;
      StageStatus st{.name = "check_axioms"};
      report.axioms = check_axioms(rt.codomain_norm, rt.grid, scenario.grid.scalars);
      bool pass = report.axioms->all_pass();
      const bool distinct_control_norm =
          rt.control_norm.kind() != rt.codomain_norm.kind() ||
          rt.control_norm.levels() != rt.codomain_norm.levels();
      if (distinct_control_norm) {
        report.control_axioms = check_axioms(rt.control_norm, rt.grid, scenario.grid.scalars);
        pass = pass && report.control_axioms->all_pass();
      }
      st.pass = pass;
      if (!pass) {
        for (const auto& rep : {report.axioms, report.control_axioms}) {
          if (!rep) continue;
          for (const auto& e : rep->entries)
            if (!e.pass && !e.failures.empty()) {
              st.detail = e.axiom + " fails, witness point index " +
                          std::to_string(e.failures.front().x_index);
              break;
            }
          if (!st.detail.empty()) break;
        }
      }
      st.millis = clock.millis();
      finish_stage(st, StageCode::AxiomsStage);
      halted = halted || !st.pass;
    }
    if (!halted) {
      StageClock clock;
      StageStatus st{.name = "check_algebra_condition"};
      report.algebra_condition = check_algebra_condition(rt.codomain_norm, *rt.algebra, rt.grid);
      st.pass = report.algebra_condition->pass;
      if (!st.pass)
        st.detail = "min slack " + std::to_string(report.algebra_condition->min_slack) +
                    " at pair (" + std::to_string(report.algebra_condition->x_index) + "," +
                    std::to_string(report.algebra_condition->y_index) + ")";
      st.millis = clock.millis();
      finish_stage(st, StageCode::AlgebraCondition);
      halted = halted || !st.pass;
    } else {
      skip_stage("check_algebra_condition");
    }
  }

  if (!want_method_stages) return report;

  // Scaling hypothesis.
  if (!halted) {
    StageClock clock;
    StageStatus st{.name = "check_scaling"};
    report.scaling = check_scaling(rt.control, rt.grid);
    st.pass = report.scaling->pass;
    if (!st.pass)
      st.detail = "min crisp slack " + std::to_string(report.scaling->min_crisp_slack) +
                  " at pair (" + std::to_string(report.scaling->x_index) + "," +
                  std::to_string(report.scaling->y_index) + ")";
    st.millis = clock.millis();
    finish_stage(st, StageCode::Scaling);
    halted = halted || !st.pass;
  } else {
    skip_stage("check_scaling");
  }

  // Defect domination; retries shrink the noise budget.
  const DominationScope scope =
      verb == PipelineVerb::Stabilize ? DominationScope::AdditiveOnly : DominationScope::Full;
  std::optional<ApproximateMap> certified;
  if (!halted) {
    StageClock clock;
    StageStatus st{.name = "certify_defect_domination"};
    try {
      certified = make_certified_map(rt.base, scenario.perturbation.seed,
                                     scenario.perturbation.noise_scale, scenario.perturbation.mode,
                                     scenario.perturbation.direction, rt.control, rt.codomain_norm,
                                     rt.grid, scope);
      report.effective_noise_scale = certified->noise_scale();
      report.domination = certify_defect_domination(*certified, rt.grid, scope);
      st.pass = report.domination->pass;
    } catch (const std::exception& e) {
      st.pass = false;
      st.detail = e.what();
    }
    if (!st.pass && st.detail.empty() && report.domination)
      st.detail = "violated at pair (" + std::to_string(report.domination->x_index) + "," +
                  std::to_string(report.domination->y_index) + ")";
    st.millis = clock.millis();
    finish_stage(st, StageCode::Domination);
    halted = halted || !st.pass;
  } else {
    skip_stage("certify_defect_domination");
  }

  // Direct-method stabilization over the grid points.
  std::optional<Stabilizer> stab;
  if (!halted && certified) {
    StageClock clock;
    StageStatus st{.name = "stabilize"};
    try {
      stab.emplace(Stabilizer::for_map(*certified, scenario.stabilizer));
      report.stabilization = stab->run(rt.grid.points);
      st.pass = report.stabilization->all_converged();
      if (!st.pass) st.detail = "not all probes converged within max_iters (partial result)";
      for (const auto& probe : report.stabilization->probes) {
        TrajectoryCert cert;
        cert.limit_pass = fuzzy_limit_check(probe.trajectory, probe.recovered, rt.codomain_norm,
                                            rt.grid.thresholds, scenario.stabilizer.fuzzy_delta)
                              .pass;
        cert.cauchy_pass = cauchy_check(probe.trajectory, rt.codomain_norm, rt.grid.thresholds,
                                        scenario.stabilizer.fuzzy_delta)
                               .pass;
        report.trajectory_certs.push_back(cert);
      }
    } catch (const StabilizeOverflow& e) {
      st.pass = false;
      st.detail = e.what();
      stab.reset();
    }
    st.millis = clock.millis();
    finish_stage(st, StageCode::Stabilize);
    halted = halted || !stab.has_value();
  } else {
    skip_stage("stabilize");
  }

  if (!stab) {
    skip_stage("defects");
    skip_stage("check_stability_bound");
    if (full_battery) skip_stage("check_uniqueness");
    return report;
  }

  const ElementMap f = [&certified](const Element& x) { return certified->realize(x); };
  const Stabilizer& stabilizer = *stab;
  const ElementMap h = [&stabilizer](const Element& x) { return stabilizer.recover(x); };
  const double defect_gate = 100.0 * scenario.stabilizer.tol;
  const bool derivation = scenario.perturbation.mode == PerturbMode::Derivation;

  // Identity defects of the recovered map; intermediates are measurements
  // relating it to f and are gated only through the combination step.
  {
    StageClock clock;
    StageStatus st{.name = "defects"};
    std::vector<DefectKind> kinds{DefectKind::Additive};
    if (full_battery) {
      if (derivation) {
        kinds.push_back(DefectKind::Leibniz);
        kinds.push_back(DefectKind::IntermediateDerProductCarry);
        kinds.push_back(DefectKind::IntermediateDerFactorSwap);
      } else {
        kinds.push_back(DefectKind::Multiplicative);
        kinds.push_back(DefectKind::IntermediateHomProductCarry);
        kinds.push_back(DefectKind::IntermediateHomFactorSwap);
      }
    }
    double theta_carry = 0.0, theta_swap = 0.0, product_defect = 0.0;
    for (DefectKind kind : kinds) {
      report.defects.push_back(defect(kind, f, h, *rt.algebra, rt.grid));
      const DefectReport& rep = report.defects.back();
      switch (kind) {
        case DefectKind::Additive:
        case DefectKind::Multiplicative:
        case DefectKind::Leibniz:
          report.defect_gate_pass = report.defect_gate_pass && rep.max_defect <= defect_gate;
          if (kind != DefectKind::Additive) product_defect = rep.max_defect;
          break;
        case DefectKind::IntermediateHomProductCarry:
        case DefectKind::IntermediateDerProductCarry:
          theta_carry = rep.max_defect;
          break;
        case DefectKind::IntermediateHomFactorSwap:
        case DefectKind::IntermediateDerFactorSwap:
          theta_swap = rep.max_defect;
          break;
      }
    }
    if (full_battery) {
      double max_h_norm = 0.0;
      for (const Element& x : rt.grid.points)
        max_h_norm = std::max(max_h_norm, crisp_norm(h(x)));
      report.chain_pass = bootstrap_chain_holds(product_defect, theta_carry, theta_swap, max_h_norm);
    }
    st.pass = report.defect_gate_pass && report.chain_pass;
    if (!st.pass) st.detail = "recovered-map identity defects exceed 100*tol";
    st.millis = clock.millis();
    finish_stage(st, StageCode::Defects);
  }

  // Stability bound.
  {
    StageClock clock;
    StageStatus st{.name = "check_stability_bound"};
    report.bound = check_stability_bound(f, h, rt.control, rt.codomain_norm, rt.grid,
                                         10.0 * scenario.stabilizer.tol);
    st.pass = report.bound->pass;
    if (!st.pass)
      st.detail = "min fuzzy slack " + std::to_string(report.bound->min_fuzzy_slack) +
                  ", max crisp excess " + std::to_string(report.bound->max_crisp_excess);
    st.millis = clock.millis();
    finish_stage(st, StageCode::Bound);
  }

  // Uniqueness via a second construction route.
  if (full_battery) {
    StageClock clock;
    StageStatus st{.name = "check_uniqueness"};
    StabilizerConfig alt = scenario.stabilizer;
    alt.mode = scenario.uniqueness.alt_mode;
    alt.max_iters = scenario.uniqueness.alt_max_iters;
    try {
      validate_mode_for_control(rt.control, alt.mode);
      report.uniqueness =
          check_uniqueness(f, certified->domain(), certified->codomain(), rt.grid.points,
                           scenario.stabilizer, alt, rt.codomain_norm, rt.grid.thresholds,
                           scenario.uniqueness.delta);
      st.pass = report.uniqueness->pass;
      if (!st.pass)
        st.detail = "max crisp diff " + std::to_string(report.uniqueness->max_crisp_diff);
    } catch (const std::exception& e) {
      st.pass = false;
      st.detail = e.what();
    }
    st.millis = clock.millis();
    finish_stage(st, StageCode::Uniqueness);
  }

  return report;
}

}  // namespace fuzzystab
