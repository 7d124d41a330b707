#include "fuzzystab/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fuzzystab {

namespace {

constexpr double kSlack = 1e-12;

}  // namespace

std::string defect_kind_name(DefectKind kind) {
  switch (kind) {
    case DefectKind::Additive: return "additive";
    case DefectKind::Multiplicative: return "multiplicative";
    case DefectKind::Leibniz: return "leibniz";
    case DefectKind::IntermediateHomProductCarry: return "hom_product_carry";
    case DefectKind::IntermediateHomFactorSwap: return "hom_factor_swap";
    case DefectKind::IntermediateDerProductCarry: return "der_product_carry";
    case DefectKind::IntermediateDerFactorSwap: return "der_factor_swap";
  }
  return "unknown";
}

DefectReport defect(DefectKind kind, const ElementMap& approx, const ElementMap& recovered,
                    const FiniteAlgebra& alg, const SampleGrid& grid) {
  grid.validate();
  for (const Element& x : grid.points)
    if (x.algebra().get() != &alg)
      throw std::invalid_argument("defect grid points do not live in the given algebra");
  DefectReport report;
  report.kind = kind;
  report.point_count = grid.points.size();
  report.pair_count = grid.points.size() * grid.points.size();
  report.threshold_count = grid.thresholds.size();
  report.values.reserve(report.pair_count);

  const auto& pts = grid.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      double value = 0.0;
      try {
        const Element& a = pts[i];
        const Element& b = pts[j];
        switch (kind) {
          case DefectKind::Additive:
            value = crisp_norm(recovered(a + b) - recovered(a) - recovered(b));
            break;
          case DefectKind::Multiplicative:
            value = crisp_norm(recovered(a * b) - recovered(a) * recovered(b));
            break;
          case DefectKind::Leibniz:
            value = crisp_norm(recovered(a * b) - a * recovered(b) - recovered(a) * b);
            break;
          case DefectKind::IntermediateHomProductCarry:
            value = crisp_norm(recovered(a * b) - recovered(a) * approx(b));
            break;
          case DefectKind::IntermediateHomFactorSwap:
            value = crisp_norm(recovered(a) * recovered(b) - recovered(a) * approx(b));
            break;
          case DefectKind::IntermediateDerProductCarry:
            value = crisp_norm(recovered(a * b) - a * approx(b) - recovered(a) * b);
            break;
          case DefectKind::IntermediateDerFactorSwap:
            value = crisp_norm(a * approx(b) - a * recovered(b));
            break;
        }
      } catch (const std::exception& e) {
        throw std::runtime_error("defect(" + defect_kind_name(kind) + ") failed at pair (" +
                                 std::to_string(i) + "," + std::to_string(j) + "): " + e.what());
      }
      if (value > report.max_defect) {
        report.max_defect = value;
        report.x_index = i;
        report.y_index = j;
      }
      report.values.push_back(value);
    }
  }
  return report;
}

BoundCheckReport check_stability_bound(const ElementMap& approx, const ElementMap& recovered,
                                       const ControlFunction& ctrl, const FuzzyNorm& codomain_norm,
                                       const SampleGrid& grid, double crisp_allowance) {
  grid.validate();
  BoundCheckReport report;
  report.min_fuzzy_slack = std::numeric_limits<double>::infinity();
  report.max_crisp_excess = -std::numeric_limits<double>::infinity();

  const FuzzyNorm& nprime = ctrl.codomain_norm();
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const Element& a = grid.points[i];
    const double dist = crisp_norm(approx(a) - recovered(a));
    const double bound = fuzzy_bound_threshold(ctrl, a);
    report.max_crisp_excess = std::max(report.max_crisp_excess, dist - bound);
    for (double t : grid.thresholds) {
      BoundCheckRow row{.point_index = i, .threshold = t};
      row.lhs = codomain_norm.eval_magnitude(dist, t);
      row.rhs = nprime.eval_magnitude(bound, t);
      row.fuzzy_slack = row.lhs - row.rhs;
      row.crisp_dist = dist;
      row.crisp_bound = bound;
      report.min_fuzzy_slack = std::min(report.min_fuzzy_slack, row.fuzzy_slack);
      report.rows.push_back(row);
    }
  }
  report.pass =
      report.min_fuzzy_slack >= -kSlack && report.max_crisp_excess <= crisp_allowance + kSlack;
  return report;
}

UniquenessReport check_uniqueness(const ElementMap& f, const AlgebraPtr& domain,
                                  const AlgebraPtr& codomain, const std::vector<Element>& probes,
                                  const StabilizerConfig& cfg_a, const StabilizerConfig& cfg_b,
                                  const FuzzyNorm& codomain_norm,
                                  const std::vector<double>& thresholds, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("check_uniqueness requires delta in (0,1)");

  UniquenessReport report;
  report.distinct_routes =
      cfg_a.mode != cfg_b.mode || cfg_a.max_iters != cfg_b.max_iters;
  report.crisp_gate = 100.0 * std::max(cfg_a.tol, cfg_b.tol);

  const Stabilizer route_a(f, domain, codomain, cfg_a);
  const Stabilizer route_b(f, domain, codomain, cfg_b);
  const StabilizationResult res_a = route_a.run(probes);
  const StabilizationResult res_b = route_b.run(probes);

  bool all = true;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    UniquenessRow row{.probe_index = i};
    const Element diff = res_a.probes[i].recovered - res_b.probes[i].recovered;
    row.crisp_diff = crisp_norm(diff);
    row.min_fuzzy = 1.0;
    for (double t : thresholds)
      row.min_fuzzy = std::min(row.min_fuzzy, codomain_norm.eval(diff, t));
    row.pass = row.min_fuzzy > 1.0 - delta && row.crisp_diff <= report.crisp_gate;
    all = all && row.pass;
    report.max_crisp_diff = std::max(report.max_crisp_diff, row.crisp_diff);
    report.min_fuzzy = std::min(report.min_fuzzy, row.min_fuzzy);
    report.rows.push_back(row);
  }
  report.pass = all;
  return report;
}

bool bootstrap_chain_holds(double product_defect, double theta_carry, double theta_swap,
                           double max_recovered_norm) {
  const double theta = std::max(theta_carry, theta_swap);
  return product_defect <= 2.0 * theta * (1.0 + max_recovered_norm) + kSlack;
}

}  // namespace fuzzystab
