#ifndef FUZZYSTAB_CONTROL_HPP
#define FUZZYSTAB_CONTROL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fuzzystab/algebra.hpp"
#include "fuzzystab/fuzzy_norm.hpp"

namespace fuzzystab {

enum class ControlKind { Constant, PowerSum };
enum class ScalingDirection { Doubling, Halving };

/// Control function phi with its scaling factor alpha and the codomain fuzzy
/// norm it is measured in. Only the crisp magnitude of phi is observable, so
/// the pair (magnitude, norm) carries its full content.
///
/// Constant:  phi(a,b) = eps, valid with alpha in [1,2).
/// PowerSum:  phi(a,b) = eps (||a||^p + ||b||^p). For p < 1 the doubling
///            hypothesis phi(2a,2b) <= alpha phi(a,b) holds with equality at
///            alpha = 2^p; for p > 1 that factor reaches 2 and the halving
///            hypothesis phi(a/2,b/2) <= (alpha/4) phi(a,b) is certified
///            instead, with equality at alpha = 2^(2-p). p = 1 is rejected.
class ControlFunction {
 public:
  static ControlFunction constant(double eps, AlgebraPtr domain, FuzzyNorm codomain_norm,
                                  std::optional<double> alpha = std::nullopt);
  static ControlFunction power_sum(double eps, double p, AlgebraPtr domain,
                                   FuzzyNorm codomain_norm,
                                   std::optional<double> alpha = std::nullopt);

  ControlKind kind() const { return kind_; }
  double eps() const { return eps_; }
  double p() const { return p_; }
  double alpha() const { return alpha_; }
  ScalingDirection scaling_direction() const { return direction_; }
  const FuzzyNorm& codomain_norm() const { return codomain_norm_; }
  const AlgebraPtr& domain() const { return domain_; }

  /// Crisp magnitude of phi(a,b). For PowerSum with p < 0 and a zero argument
  /// the inequality has no content and +infinity is returned as a sentinel.
  double magnitude(const Element& a, const Element& b) const;
  double magnitude_from_norms(double norm_a, double norm_b) const;

 private:
  ControlFunction(ControlKind kind, double eps, double p, double alpha,
                  ScalingDirection direction, AlgebraPtr domain, FuzzyNorm codomain_norm);

  ControlKind kind_;
  double eps_;
  double p_;
  double alpha_;
  ScalingDirection direction_;
  AlgebraPtr domain_;
  FuzzyNorm codomain_norm_;
};

struct ScalingRow {
  std::size_t x_index = 0;
  std::size_t y_index = 0;
  double phi_base = 0.0;     // phi(a,b)
  double phi_scaled = 0.0;   // phi(2a,2b) or phi(a/2,b/2)
  double crisp_slack = 0.0;  // allowed - actual, >= 0 on pass
  double fuzzy_min_slack = 0.0;
};

struct ScalingReport {
  bool pass = false;
  ScalingDirection direction = ScalingDirection::Doubling;
  double min_crisp_slack = 0.0;
  double min_fuzzy_slack = 0.0;
  std::size_t x_index = 0, y_index = 0;  // worst pair
  std::size_t skipped = 0;               // pairs with infinite phi (p < 0 sentinel)
  std::vector<ScalingRow> rows;
};

/// Verifies the alpha-scaling hypothesis on the grid, both as the reduced
/// crisp inequality and as the fuzzy inequality at every grid threshold.
ScalingReport check_scaling(const ControlFunction& ctrl, const SampleGrid& grid);

enum class PerturbMode { Homomorphism, Derivation };
enum class NoiseDirection { Hashed, Fixed };

/// Deterministic approximately-additive, approximately-multiplicative (or
/// approximately-Leibniz) map f = h0 + eta. The perturbation eta(a) is a
/// seeded pseudo-random direction of crisp norm exactly
/// min(noise_scale, phi(a,a)/2), with eta(0) = 0; Fixed direction uses the
/// normalized all-ones vector instead of a hashed one.
class ApproximateMap {
 public:
  ApproximateMap(LinearMap base, std::uint64_t noise_seed, double noise_scale, PerturbMode mode,
                 NoiseDirection direction, ControlFunction control, FuzzyNorm codomain_norm);

  Element realize(const Element& a) const;
  Element noise(const Element& a) const;

  const LinearMap& base() const { return base_; }
  const AlgebraPtr& domain() const { return base_.domain(); }
  const AlgebraPtr& codomain() const { return base_.codomain(); }
  std::uint64_t noise_seed() const { return noise_seed_; }
  double noise_scale() const { return noise_scale_; }
  PerturbMode mode() const { return mode_; }
  NoiseDirection direction() const { return direction_; }
  const ControlFunction& control() const { return control_; }
  const FuzzyNorm& codomain_norm() const { return codomain_norm_; }

  ApproximateMap with_noise_scale(double scale) const;

 private:
  LinearMap base_;
  std::uint64_t noise_seed_;
  double noise_scale_;
  PerturbMode mode_;
  NoiseDirection direction_;
  ControlFunction control_;
  FuzzyNorm codomain_norm_;
};

enum class DominationScope { AdditiveOnly, Full };

struct DominationRow {
  std::size_t x_index = 0;
  std::size_t y_index = 0;
  double additive_defect = 0.0;
  double product_defect = 0.0;  // multiplicative or Leibniz, NaN when not checked
  double phi = 0.0;
  double fuzzy_min_slack = 0.0;
  bool ok = true;
};

struct DominationReport {
  bool pass = false;
  DominationScope scope = DominationScope::Full;
  double max_additive_defect = 0.0;
  double max_product_defect = 0.0;
  double min_fuzzy_slack = 0.0;
  std::size_t x_index = 0, y_index = 0;  // worst pair
  std::vector<DominationRow> rows;
};

/// Checks the fuzzy domination of the realized map's defects by phi on every
/// grid pair and threshold: the additive inequality always, the product
/// (multiplicative or Leibniz, per mode) inequality when scope is Full. The
/// crisp comparison ||defect|| <= phi is evaluated alongside.
DominationReport certify_defect_domination(const ApproximateMap& map, const SampleGrid& grid,
                                           DominationScope scope = DominationScope::Full);

/// Builds an ApproximateMap and certifies domination on the grid, halving
/// noise_scale up to 8 times until certification passes. Throws when even the
/// smallest budget fails.
ApproximateMap make_certified_map(LinearMap base, std::uint64_t noise_seed, double noise_scale,
                                  PerturbMode mode, NoiseDirection direction,
                                  ControlFunction control, FuzzyNorm codomain_norm,
                                  const SampleGrid& grid,
                                  DominationScope scope = DominationScope::Full);

}  // namespace fuzzystab

#endif
