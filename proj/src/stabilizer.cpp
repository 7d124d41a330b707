#include "fuzzystab/stabilizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fuzzystab/rng.hpp"

namespace fuzzystab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::string describe_point(const Element& a) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    if (i) os << ",";
    os << a.coeffs()[i];
  }
  os << ")";
  return os.str();
}

std::vector<double> cache_key(const Element& x) {
  std::vector<double> key = x.coeffs();
  for (double& v : key)
    if (v == 0.0) v = 0.0;  // fold -0.0 so numerically equal points share a slot
  return key;
}

}  // namespace

void StabilizerConfig::validate() const {
  require(max_iters >= 1, "max_iters must be at least 1");
  require(tol > 0.0, "tol must be positive");
  require(overflow_cap > 0.0, "overflow_cap must be positive");
  require(fuzzy_delta > 0.0 && fuzzy_delta < 1.0, "fuzzy_delta must lie in (0,1)");
}

bool StabilizationResult::all_converged() const {
  for (const auto& p : probes)
    if (!p.converged) return false;
  return true;
}

Stabilizer::Stabilizer(ElementMap f, AlgebraPtr domain, AlgebraPtr codomain, StabilizerConfig cfg)
    : f_(std::move(f)), domain_(std::move(domain)), codomain_(std::move(codomain)), cfg_(cfg) {
  cfg_.validate();
  require(static_cast<bool>(f_), "stabilizer requires a map");
  require(domain_ && codomain_, "stabilizer requires domain and codomain algebras");
}

Stabilizer Stabilizer::for_map(const ApproximateMap& map, StabilizerConfig cfg) {
  validate_mode_for_control(map.control(), cfg.mode);
  return Stabilizer([map](const Element& a) { return map.realize(a); }, map.domain(),
                    map.codomain(), cfg);
}

void validate_mode_for_control(const ControlFunction& ctrl, StabilizerMode mode) {
  if (mode == StabilizerMode::Superlinear) {
    require(ctrl.kind() == ControlKind::PowerSum && ctrl.p() > 1.0,
            "superlinear mode requires a power-sum control with p > 1");
  } else {
    require(ctrl.scaling_direction() == ScalingDirection::Doubling,
            "dyadic/linear modes require the doubling hypothesis with 0 < alpha < 2; "
            "a power sum with p > 1 scales by 2^p >= 2 and needs superlinear mode");
  }
}

ProbeResult Stabilizer::stabilize_point(const Element& a) const {
  ProbeResult result;
  result.probe = a;

  // Rescale to unit crisp norm by an exact power of two; restore at the end.
  const double norm = crisp_norm(a);
  int exp = 0;
  if (norm > 0.0) std::frexp(norm, &exp);
  const Element base = std::ldexp(1.0, -exp) * a;
  const double restore = std::ldexp(1.0, exp);

  Element arg = base;
  double scale_num = 1.0;  // multiplier applied to f(arg)

  const auto iterate_value = [&](const Element& argument, double multiplier) {
    if (crisp_norm(argument) > cfg_.overflow_cap)
      throw StabilizeOverflow("iterate argument norm exceeded overflow_cap at probe " +
                                  describe_point(a) + ", n=" + std::to_string(result.iters_used),
                              result.iters_used);
    Element value = restore * (multiplier * f_(argument));
    if (crisp_norm(value) > cfg_.overflow_cap)
      throw StabilizeOverflow("iterate norm exceeded overflow_cap at probe " + describe_point(a) +
                                  ", n=" + std::to_string(result.iters_used),
                              result.iters_used);
    return value;
  };

  Element current = iterate_value(arg, 1.0);
  result.trajectory.push_back(current);
  result.residual = std::numeric_limits<double>::infinity();

  for (int n = 1; n <= cfg_.max_iters; ++n) {
    result.iters_used = n;
    switch (cfg_.mode) {
      case StabilizerMode::Dyadic:
        arg = 2.0 * arg;
        scale_num = std::ldexp(1.0, -n);
        break;
      case StabilizerMode::LinearDiagnostic:
        arg = 3.0 * arg;
        scale_num /= 3.0;
        break;
      case StabilizerMode::Superlinear:
        arg = 0.5 * arg;
        scale_num = std::ldexp(1.0, n);
        break;
    }
    const Element next = iterate_value(arg, scale_num);
    result.trajectory.push_back(next);
    result.residual = crisp_norm(next - current);
    current = next;
    if (result.residual <= cfg_.tol) {
      result.converged = true;
      break;
    }
  }
  result.recovered = current;
  return result;
}

StabilizationResult Stabilizer::run(const std::vector<Element>& probes) const {
  StabilizationResult out;
  out.mode_used = cfg_.mode;
  out.probes.reserve(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    try {
      out.probes.push_back(stabilize_point(probes[i]));
    } catch (const StabilizeOverflow& e) {
      throw StabilizeOverflow("probe " + std::to_string(i) + ": " + e.what(), e.n);
    }
    cache_.insert_or_assign(cache_key(probes[i]), out.probes.back().recovered);
  }
  return out;
}

Element Stabilizer::recover(const Element& x) const {
  const auto key = cache_key(x);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  Element value = stabilize_point(x).recovered;
  cache_.emplace(std::move(key), value);
  return value;
}

double hyers_bound(double eps) {
  require(eps >= 0.0, "hyers_bound requires a nonnegative budget");
  return eps;
}

double rassias_bound(double eps, double p, double x_norm) {
  require(eps > 0.0, "rassias_bound requires eps > 0");
  require(p < 1.0, "rassias_bound requires p < 1");
  if (p < 0.0) require(x_norm > 0.0, "rassias_bound with p < 0 requires x != 0");
  return 2.0 * eps / (2.0 - std::exp2(p)) * std::pow(x_norm, p);
}

double fuzzy_bound_threshold(const ControlFunction& ctrl, const Element& a) {
  return 2.0 * ctrl.magnitude(a, a) / (2.0 - ctrl.alpha());
}

}  // namespace fuzzystab
