#include "fuzzystab/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fuzzystab/rng.hpp"

namespace fuzzystab {

namespace {

constexpr double kSlack = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

ControlFunction::ControlFunction(ControlKind kind, double eps, double p, double alpha,
                                 ScalingDirection direction, AlgebraPtr domain,
                                 FuzzyNorm codomain_norm)
    : kind_(kind),
      eps_(eps),
      p_(p),
      alpha_(alpha),
      direction_(direction),
      domain_(std::move(domain)),
      codomain_norm_(std::move(codomain_norm)) {}

ControlFunction ControlFunction::constant(double eps, AlgebraPtr domain, FuzzyNorm codomain_norm,
                                          std::optional<double> alpha) {
  require(eps > 0.0, "constant control requires eps > 0");
  const double a = alpha.value_or(1.0);
  require(a > 0.0 && a < 2.0, "scaling factor must satisfy 0 < alpha < 2");
  require(a >= 1.0, "constant control requires alpha >= 1 (phi(2a,2b) = phi(a,b))");
  return ControlFunction(ControlKind::Constant, eps, 0.0, a, ScalingDirection::Doubling,
                         std::move(domain), std::move(codomain_norm));
}

ControlFunction ControlFunction::power_sum(double eps, double p, AlgebraPtr domain,
                                           FuzzyNorm codomain_norm, std::optional<double> alpha) {
  require(eps > 0.0, "power-sum control requires eps > 0");
  require(p != 1.0, "power-sum control requires p != 1 (alpha = 2 is excluded)");
  const ScalingDirection dir = p < 1.0 ? ScalingDirection::Doubling : ScalingDirection::Halving;
  const double natural = p < 1.0 ? std::exp2(p) : std::exp2(2.0 - p);
  const double a = alpha.value_or(natural);
  require(a > 0.0 && a < 2.0, "scaling factor must satisfy 0 < alpha < 2");
  require(std::abs(a - natural) <= 1e-12,
          "power-sum alpha must equal 2^p for p < 1 (or 2^(2-p) for p > 1)");
  return ControlFunction(ControlKind::PowerSum, eps, p, a, dir, std::move(domain),
                         std::move(codomain_norm));
}

double ControlFunction::magnitude(const Element& a, const Element& b) const {
  require(a.algebra().get() == domain_.get() && b.algebra().get() == domain_.get(),
          "control function arguments must live in its domain");
  return magnitude_from_norms(crisp_norm(a), crisp_norm(b));
}

double ControlFunction::magnitude_from_norms(double norm_a, double norm_b) const {
  if (kind_ == ControlKind::Constant) return eps_;
  if (p_ < 0.0 && (norm_a == 0.0 || norm_b == 0.0)) return kInf;
  return eps_ * (std::pow(norm_a, p_) + std::pow(norm_b, p_));
}

ScalingReport check_scaling(const ControlFunction& ctrl, const SampleGrid& grid) {
  grid.validate();
  ScalingReport report;
  report.direction = ctrl.scaling_direction();
  report.min_crisp_slack = kInf;
  report.min_fuzzy_slack = kInf;

  const FuzzyNorm& nprime = ctrl.codomain_norm();
  const auto& pts = grid.points;
  std::vector<double> norms(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) norms[i] = crisp_norm(pts[i]);

  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double phi = ctrl.magnitude_from_norms(norms[i], norms[j]);
      double phi_scaled, allowed;
      if (report.direction == ScalingDirection::Doubling) {
        phi_scaled = ctrl.magnitude_from_norms(2.0 * norms[i], 2.0 * norms[j]);
        allowed = ctrl.alpha() * phi;
      } else {
        phi_scaled = ctrl.magnitude_from_norms(norms[i] / 2.0, norms[j] / 2.0);
        allowed = ctrl.alpha() / 4.0 * phi;
      }
      if (!std::isfinite(phi) || !std::isfinite(phi_scaled)) {
        ++report.skipped;
        continue;
      }
      ScalingRow row{.x_index = i, .y_index = j, .phi_base = phi, .phi_scaled = phi_scaled};
      row.crisp_slack = allowed - phi_scaled;
      row.fuzzy_min_slack = kInf;
      for (double t : grid.thresholds) {
        const double lhs = nprime.eval_magnitude(phi_scaled, t);
        const double rhs = nprime.eval_magnitude(allowed, t);
        row.fuzzy_min_slack = std::min(row.fuzzy_min_slack, lhs - rhs);
      }
      if (row.crisp_slack < report.min_crisp_slack) {
        report.min_crisp_slack = row.crisp_slack;
        report.x_index = i;
        report.y_index = j;
      }
      report.min_fuzzy_slack = std::min(report.min_fuzzy_slack, row.fuzzy_min_slack);
      report.rows.push_back(row);
    }
  }
  report.pass = report.min_crisp_slack >= -kSlack && report.min_fuzzy_slack >= -kSlack;
  return report;
}

ApproximateMap::ApproximateMap(LinearMap base, std::uint64_t noise_seed, double noise_scale,
                               PerturbMode mode, NoiseDirection direction, ControlFunction control,
                               FuzzyNorm codomain_norm)
    : base_(std::move(base)),
      noise_seed_(noise_seed),
      noise_scale_(noise_scale),
      mode_(mode),
      direction_(direction),
      control_(std::move(control)),
      codomain_norm_(std::move(codomain_norm)) {
  require(noise_scale_ >= 0.0, "noise scale must be nonnegative");
  require(control_.domain().get() == base_.domain().get(),
          "control function domain must match the map domain");
  require(codomain_norm_.carrier().get() == base_.codomain().get(),
          "codomain fuzzy norm must live on the map codomain");
  if (mode_ == PerturbMode::Derivation)
    require(base_.domain().get() == base_.codomain().get(),
            "derivation mode requires a self-map");
}

ApproximateMap ApproximateMap::with_noise_scale(double scale) const {
  return ApproximateMap(base_, noise_seed_, scale, mode_, direction_, control_, codomain_norm_);
}

Element ApproximateMap::noise(const Element& a) const {
  const AlgebraPtr& cod = base_.codomain();
  if (a.is_zero() || noise_scale_ == 0.0) return cod->zero();

  const double budget = 0.5 * control_.magnitude(a, a);
  const double mag = std::min(noise_scale_, budget);
  if (mag == 0.0) return cod->zero();

  const std::size_t m = cod->dim();
  std::vector<double> dir(m);
  if (direction_ == NoiseDirection::Fixed) {
    std::fill(dir.begin(), dir.end(), 1.0);
  } else {
    SplitMix64 rng(hash_seed_coeffs(noise_seed_, a.coeffs()));
    for (double& v : dir) v = rng.next_gaussian();
  }
  double dn = cod->crisp_norm(dir);
  if (dn == 0.0) {
    std::fill(dir.begin(), dir.end(), 0.0);
    dir[0] = 1.0;
    dn = cod->crisp_norm(dir);
  }
  for (double& v : dir) v *= mag / dn;
  return cod->element(std::move(dir));
}

Element ApproximateMap::realize(const Element& a) const { return base_.apply(a) + noise(a); }

DominationReport certify_defect_domination(const ApproximateMap& map, const SampleGrid& grid,
                                           DominationScope scope) {
  grid.validate();
  DominationReport report;
  report.scope = scope;
  report.min_fuzzy_slack = kInf;

  const FuzzyNorm& n = map.codomain_norm();
  const FuzzyNorm& nprime = map.control().codomain_norm();
  const auto& pts = grid.points;
  const bool full = scope == DominationScope::Full;

  std::vector<Element> images;
  images.reserve(pts.size());
  for (const Element& x : pts) images.push_back(map.realize(x));

  bool ok_all = true;
  double worst = -kInf;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double phi = map.control().magnitude(pts[i], pts[j]);
      DominationRow row{.x_index = i, .y_index = j, .phi = phi};
      row.product_defect = std::numeric_limits<double>::quiet_NaN();

      const Element add_defect = map.realize(pts[i] + pts[j]) - images[i] - images[j];
      row.additive_defect = crisp_norm(add_defect);
      report.max_additive_defect = std::max(report.max_additive_defect, row.additive_defect);

      double prod_defect_norm = -kInf;
      if (full) {
        const Element prod = pts[i] * pts[j];
        Element defect = map.realize(prod);
        if (map.mode() == PerturbMode::Homomorphism) {
          defect = defect - images[i] * images[j];
        } else {
          defect = defect - pts[i] * images[j] - images[i] * pts[j];
        }
        prod_defect_norm = crisp_norm(defect);
        row.product_defect = prod_defect_norm;
        report.max_product_defect = std::max(report.max_product_defect, prod_defect_norm);
      }

      row.fuzzy_min_slack = kInf;
      if (std::isinf(phi)) {
        // p < 0 sentinel: the hypothesis is vacuous at zero arguments.
        row.ok = true;
      } else {
        for (double t : grid.thresholds) {
          const double rhs = nprime.eval_magnitude(phi, t);
          double lhs = n.eval_magnitude(row.additive_defect, t);
          row.fuzzy_min_slack = std::min(row.fuzzy_min_slack, lhs - rhs);
          if (full) {
            lhs = n.eval_magnitude(prod_defect_norm, t);
            row.fuzzy_min_slack = std::min(row.fuzzy_min_slack, lhs - rhs);
          }
        }
        const bool crisp_ok = row.additive_defect <= phi + kSlack &&
                              (!full || prod_defect_norm <= phi + kSlack);
        row.ok = crisp_ok && row.fuzzy_min_slack >= -kSlack;
        report.min_fuzzy_slack = std::min(report.min_fuzzy_slack, row.fuzzy_min_slack);
      }
      if (!row.ok) {
        ok_all = false;
        const double excess = std::max(row.additive_defect, full ? prod_defect_norm : -kInf) - phi;
        if (excess > worst) {
          worst = excess;
          report.x_index = i;
          report.y_index = j;
        }
      }
      report.rows.push_back(row);
    }
  }
  report.pass = ok_all;
  return report;
}

ApproximateMap make_certified_map(LinearMap base, std::uint64_t noise_seed, double noise_scale,
                                  PerturbMode mode, NoiseDirection direction,
                                  ControlFunction control, FuzzyNorm codomain_norm,
                                  const SampleGrid& grid, DominationScope scope) {
  ApproximateMap map(std::move(base), noise_seed, noise_scale, mode, direction,
                     std::move(control), std::move(codomain_norm));
  constexpr int kMaxRetries = 8;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    if (certify_defect_domination(map, grid, scope).pass) return map;
    map = map.with_noise_scale(map.noise_scale() / 2.0);
  }
  throw std::runtime_error(
      "defect domination failed on the grid even after halving noise_scale 8 times");
}

}  // namespace fuzzystab
