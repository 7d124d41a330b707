#ifndef FUZZYSTAB_FUZZY_NORM_HPP
#define FUZZYSTAB_FUZZY_NORM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fuzzystab/algebra.hpp"

namespace fuzzystab {

enum class FuzzyNormKind { RatioInduced, CrispIndicator, LevelFamily };

/// One level of a LevelFamily norm: the crisp norm at confidence `level` is
/// `scale` times the carrier's crisp norm. Scales must be non-decreasing in
/// the level so that higher confidence demands a larger threshold.
struct LevelEntry {
  double level;
  double scale;
  bool operator==(const LevelEntry&) const = default;
};

/// A computable fuzzy norm N(x, a) in [0,1] over a finite-dimensional carrier.
///
/// RatioInduced:   N(x,a) = a / (a + ||x||) for a > 0, else 0.
/// CrispIndicator: N(x,a) = 1 if a > ||x||, else 0.
/// LevelFamily:    N(x,a) = sup{ level : a >= scale(level) * ||x|| }, rounding
///                 down to the nearest stored level (0 if none qualifies).
class FuzzyNorm {
 public:
  static FuzzyNorm ratio_induced(AlgebraPtr carrier);
  static FuzzyNorm crisp_indicator(AlgebraPtr carrier);
  static FuzzyNorm level_family(AlgebraPtr carrier, std::vector<LevelEntry> levels);

  FuzzyNormKind kind() const { return kind_; }
  const AlgebraPtr& carrier() const { return carrier_; }
  std::size_t carrier_dim() const { return carrier_->dim(); }
  const std::vector<LevelEntry>& levels() const { return levels_; }

  /// Truth value of "||x|| <= a".
  double eval(const Element& x, double a) const;

  /// Same truth value expressed directly on a crisp magnitude r >= 0; eval()
  /// is eval_magnitude(crisp_norm(x), a). This is how the norm is applied to
  /// control-function magnitudes.
  double eval_magnitude(double r, double a) const;

  /// inf{ a > 0 : N(x,a) >= c } for c in (0,1). Closed form for the ratio and
  /// indicator kinds, table lookup for level families (+infinity when no
  /// stored level reaches c).
  double level_cut(const Element& x, double c) const;
  double level_cut_magnitude(double r, double c) const;

 private:
  FuzzyNorm(FuzzyNormKind kind, AlgebraPtr carrier, std::vector<LevelEntry> levels);

  FuzzyNormKind kind_;
  AlgebraPtr carrier_;
  std::vector<LevelEntry> levels_;
};

/// Finite discretization of the quantifiers "for all x" and "for all a > 0".
struct SampleGrid {
  std::vector<Element> points;      // nonempty, includes the zero element
  std::vector<double> thresholds;   // strictly positive, strictly increasing

  static SampleGrid defaults(const AlgebraPtr& alg, std::uint64_t probe_seed,
                             std::size_t random_points = 32);
  static std::vector<double> default_thresholds();  // {1e-3 .. 1e3}

  void validate() const;
};

std::vector<double> default_scalars();  // {+-1, +-2, +-0.5, +-3}

struct AxiomWitness {
  std::size_t x_index = 0;
  std::optional<std::size_t> y_index;
  std::optional<double> scalar;
  double a = 0.0;
  std::optional<double> b;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct AxiomEntry {
  std::string axiom;  // "N1".."N6"
  bool pass = true;
  bool vacuous = false;
  std::string note;
  std::size_t checks = 0;
  std::size_t failure_count = 0;
  std::vector<AxiomWitness> failures;  // capped, first few only
};

struct AxiomReport {
  std::vector<AxiomEntry> entries;
  std::size_t point_count = 0;
  std::size_t threshold_count = 0;
  std::size_t scalar_count = 0;
  bool all_pass() const;
  const AxiomEntry& entry(const std::string& axiom) const;
};

/// Exhaustive grid check of axioms N1-N5 (pairs for N4, the scalar list for
/// N3) plus the grid-level monotone proxy for N6. Comparisons carry a 1e-12
/// absolute slack in favor of "pass".
AxiomReport check_axioms(const FuzzyNorm& norm, const SampleGrid& grid,
                         const std::vector<double>& scalars = default_scalars());

struct AlgebraConditionRow {
  std::size_t x_index = 0;
  std::size_t y_index = 0;
  double min_slack = 0.0;  // min over threshold pairs of lhs - rhs
  double worst_a = 0.0;
  double worst_b = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct AlgebraConditionReport {
  bool pass = false;
  double min_slack = 0.0;
  std::size_t violations = 0;
  std::size_t x_index = 0, y_index = 0;  // overall worst pair
  double worst_a = 0.0, worst_b = 0.0;
  std::vector<AlgebraConditionRow> rows;  // one per point pair, grid order
};

/// Checks N(xy, ab) >= min{N(x,a), N(y,b)} over all point pairs and threshold
/// pairs of the grid.
AlgebraConditionReport check_algebra_condition(const FuzzyNorm& norm, const FiniteAlgebra& alg,
                                               const SampleGrid& grid);

struct ConvergenceCheck {
  bool pass = false;
  std::string detail;  // first failure, empty on pass
};

/// Grid version of fuzzy convergence x_n -> x: the last iterate must satisfy
/// N(x_last - x, a) > 1 - delta at every grid threshold, and the per-threshold
/// values must be non-decreasing over the last quartile of the sequence.
ConvergenceCheck fuzzy_limit_check(const std::vector<Element>& seq, const Element& x,
                                   const FuzzyNorm& norm, const std::vector<double>& thresholds,
                                   double delta);

/// Grid version of the fuzzy Cauchy criterion: N(x_{n+p} - x_n, a) > 1 - delta
/// for all pairs inside the last quartile of the sequence.
ConvergenceCheck cauchy_check(const std::vector<Element>& seq, const FuzzyNorm& norm,
                              const std::vector<double>& thresholds, double delta);

}  // namespace fuzzystab

#endif
