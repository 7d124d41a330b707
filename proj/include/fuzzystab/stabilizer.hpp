#ifndef FUZZYSTAB_STABILIZER_HPP
#define FUZZYSTAB_STABILIZER_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fuzzystab/algebra.hpp"
#include "fuzzystab/control.hpp"
#include "fuzzystab/fuzzy_norm.hpp"

namespace fuzzystab {

enum class StabilizerMode { Dyadic, LinearDiagnostic, Superlinear };

/// Numerical stopping rules for the direct-method limit. The limits
/// themselves are exact; these knobs only control when iteration stops.
struct StabilizerConfig {
  StabilizerMode mode = StabilizerMode::Dyadic;
  int max_iters = 64;
  double tol = 1e-10;             // crisp successive-difference threshold
  double overflow_cap = 1e150;    // abort threshold on intermediate crisp norms
  double fuzzy_delta = 1e-6;      // for post-hoc fuzzy convergence certification

  void validate() const;
};

struct ProbeResult {
  Element probe;
  Element recovered;
  int iters_used = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<Element> trajectory;  // h_0 .. h_N
};

struct StabilizationResult {
  std::vector<ProbeResult> probes;
  StabilizerMode mode_used = StabilizerMode::Dyadic;
  bool all_converged() const;
};

struct StabilizeOverflow : std::runtime_error {
  StabilizeOverflow(std::string msg, int iteration) : std::runtime_error(std::move(msg)), n(iteration) {}
  int n;
};

using ElementMap = std::function<Element(const Element&)>;

/// The direct method: recover the exact additive map near f as the limit of
/// rescaled iterates.
///
///   Dyadic:           h_n(a) = 2^-n f(2^n a)
///   LinearDiagnostic: h_k(a) = n^-1 f(n a) along the subsequence n = 3^k,
///                     exposing the proof-shaped sequence by a route that is
///                     genuinely distinct from the dyadic one yet converges
///                     geometrically at desk scale
///   Superlinear:      h_n(a) = 2^n f(2^-n a), the reverse iteration for
///                     power-sum controls with p > 1
///
/// Probes are rescaled to unit crisp norm by an exact power of two before
/// iterating and the limit is restored by the same factor; additive limits
/// are dyadic-homogeneous so the restored value is the same limit, while the
/// intermediate arguments stay far from overflow.
class Stabilizer {
 public:
  Stabilizer(ElementMap f, AlgebraPtr domain, AlgebraPtr codomain, StabilizerConfig cfg);

  /// Wires an approximate map in, after checking that its control matches the
  /// configured mode (doubling controls for dyadic/linear, halving controls —
  /// power sums with p > 1 — for superlinear).
  static Stabilizer for_map(const ApproximateMap& map, StabilizerConfig cfg);

  StabilizationResult run(const std::vector<Element>& probes) const;

  /// On-demand recovery at a single point, memoized; used by the verifier to
  /// evaluate the recovered map on sums and products outside the probe set.
  Element recover(const Element& x) const;

  ProbeResult stabilize_point(const Element& a) const;

  const StabilizerConfig& config() const { return cfg_; }
  const AlgebraPtr& domain() const { return domain_; }
  const AlgebraPtr& codomain() const { return codomain_; }

 private:
  ElementMap f_;
  AlgebraPtr domain_;
  AlgebraPtr codomain_;
  StabilizerConfig cfg_;
  mutable std::map<std::vector<double>, Element> cache_;
};

void validate_mode_for_control(const ControlFunction& ctrl, StabilizerMode mode);

/// Hyers' constant bound: a delta-bounded additive defect leaves an exact
/// additive map within delta.
double hyers_bound(double eps);

/// The power-sum bound 2 eps / (2 - 2^p) ||x||^p, p < 1.
double rassias_bound(double eps, double p, double x_norm);

/// Crisp magnitude 2 phi(a,a) / (2 - alpha) whose fuzzy value lower-bounds
/// N(f(a) - h(a), t).
double fuzzy_bound_threshold(const ControlFunction& ctrl, const Element& a);

}  // namespace fuzzystab

#endif
