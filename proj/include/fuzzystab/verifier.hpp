#ifndef FUZZYSTAB_VERIFIER_HPP
#define FUZZYSTAB_VERIFIER_HPP

#include <string>
#include <vector>

#include "fuzzystab/algebra.hpp"
#include "fuzzystab/control.hpp"
#include "fuzzystab/fuzzy_norm.hpp"
#include "fuzzystab/stabilizer.hpp"

namespace fuzzystab {

/// Residual identities measurable on a grid. Additive/Multiplicative/Leibniz
/// apply to a single map; the intermediate kinds relate the recovered map to
/// the approximate one:
///
///   Intermediate_H_ProductCarry: h(ab) - h(a) f(b)
///   Intermediate_H_FactorSwap:   h(a) h(b) - h(a) f(b)
///   Intermediate_D_ProductCarry: d(ab) - a f(b) - d(a) b
///   Intermediate_D_FactorSwap:   a f(b) - a d(b)
enum class DefectKind {
  Additive,
  Multiplicative,
  Leibniz,
  IntermediateHomProductCarry,
  IntermediateHomFactorSwap,
  IntermediateDerProductCarry,
  IntermediateDerFactorSwap,
};

std::string defect_kind_name(DefectKind kind);

struct DefectReport {
  DefectKind kind = DefectKind::Additive;
  double max_defect = 0.0;
  std::size_t x_index = 0, y_index = 0;  // maximizing pair
  std::size_t point_count = 0;
  std::size_t pair_count = 0;
  std::size_t threshold_count = 0;
  std::vector<double> values;  // one per (x,y) pair in grid order
};

/// Max crisp residual of the requested identity over all grid pairs. The
/// `approx` map is the f of the intermediate identities; `recovered` is the
/// map being measured (pass the same map twice for single-map kinds).
DefectReport defect(DefectKind kind, const ElementMap& approx, const ElementMap& recovered,
                    const FiniteAlgebra& alg, const SampleGrid& grid);

struct BoundCheckRow {
  std::size_t point_index = 0;
  double threshold = 0.0;
  double lhs = 0.0;       // N(f(a) - h(a), t)
  double rhs = 0.0;       // N'(2 phi(a,a)/(2-alpha), t)
  double fuzzy_slack = 0.0;
  double crisp_dist = 0.0;
  double crisp_bound = 0.0;
};

struct BoundCheckReport {
  bool pass = false;
  double min_fuzzy_slack = 0.0;
  double max_crisp_excess = 0.0;  // max over points of dist - bound
  std::vector<BoundCheckRow> rows;  // points x thresholds, grid order
};

/// Certifies the stability bound: at every grid point and threshold the fuzzy
/// inequality holds and the crisp distance stays within the bound magnitude
/// (up to `crisp_allowance`, which absorbs iteration error).
BoundCheckReport check_stability_bound(const ElementMap& approx, const ElementMap& recovered,
                                       const ControlFunction& ctrl, const FuzzyNorm& codomain_norm,
                                       const SampleGrid& grid, double crisp_allowance);

struct UniquenessRow {
  std::size_t probe_index = 0;
  double crisp_diff = 0.0;
  double min_fuzzy = 0.0;
  bool pass = false;
};

struct UniquenessReport {
  bool pass = false;
  bool distinct_routes = false;
  double crisp_gate = 0.0;  // 100 * max(tolA, tolB)
  double max_crisp_diff = 0.0;
  double min_fuzzy = 1.0;
  std::vector<UniquenessRow> rows;
};

/// Runs the stabilization twice under different configurations and demands
/// N(hA(a) - hB(a), t) > 1 - delta at every probe and grid threshold, plus the
/// crisp agreement ||hA - hB|| <= 100 max(tolA, tolB) that implies it under
/// ratio norms. Identical configurations pass trivially and are flagged.
UniquenessReport check_uniqueness(const ElementMap& f, const AlgebraPtr& domain,
                                  const AlgebraPtr& codomain, const std::vector<Element>& probes,
                                  const StabilizerConfig& cfg_a, const StabilizerConfig& cfg_b,
                                  const FuzzyNorm& codomain_norm,
                                  const std::vector<double>& thresholds, double delta);

/// The combination step of the proofs: the two intermediate residual bounds
/// imply the product-identity residual bound 2 theta (1 + max ||h||).
bool bootstrap_chain_holds(double product_defect, double theta_carry, double theta_swap,
                           double max_recovered_norm);

}  // namespace fuzzystab

#endif
