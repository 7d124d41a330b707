#include "fuzzystab/fuzzy_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fuzzystab/rng.hpp"

namespace fuzzystab {

namespace {

constexpr double kSlack = 1e-12;  // absolute slack in favor of "pass"
constexpr std::size_t kWitnessCap = 16;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

FuzzyNorm::FuzzyNorm(FuzzyNormKind kind, AlgebraPtr carrier, std::vector<LevelEntry> levels)
    : kind_(kind), carrier_(std::move(carrier)), levels_(std::move(levels)) {
  require(carrier_ != nullptr, "fuzzy norm requires a carrier");
}

FuzzyNorm FuzzyNorm::ratio_induced(AlgebraPtr carrier) {
  return FuzzyNorm(FuzzyNormKind::RatioInduced, std::move(carrier), {});
}

FuzzyNorm FuzzyNorm::crisp_indicator(AlgebraPtr carrier) {
  return FuzzyNorm(FuzzyNormKind::CrispIndicator, std::move(carrier), {});
}

FuzzyNorm FuzzyNorm::level_family(AlgebraPtr carrier, std::vector<LevelEntry> levels) {
  require(!levels.empty(), "level family requires at least one level");
  double prev_level = 0.0, prev_scale = 0.0;
  for (const auto& [level, scale] : levels) {
    require(level > prev_level && level <= 1.0, "levels must be strictly increasing in (0,1]");
    require(scale >= prev_scale && scale > 0.0, "level scales must be positive, non-decreasing");
    prev_level = level;
    prev_scale = scale;
  }
  return FuzzyNorm(FuzzyNormKind::LevelFamily, std::move(carrier), std::move(levels));
}

double FuzzyNorm::eval(const Element& x, double a) const {
  require(x.algebra().get() == carrier_.get(), "element does not live in the norm's carrier");
  return eval_magnitude(fuzzystab::crisp_norm(x), a);
}

double FuzzyNorm::eval_magnitude(double r, double a) const {
  if (a <= 0.0) return 0.0;
  switch (kind_) {
    case FuzzyNormKind::RatioInduced:
      return a / (a + r);
    case FuzzyNormKind::CrispIndicator:
      return a > r ? 1.0 : 0.0;
    case FuzzyNormKind::LevelFamily: {
      double best = 0.0;
      for (const auto& [level, scale] : levels_)
        if (a >= scale * r) best = level;
      return best;
    }
  }
  return 0.0;
}

double FuzzyNorm::level_cut(const Element& x, double c) const {
  require(x.algebra().get() == carrier_.get(), "element does not live in the norm's carrier");
  return level_cut_magnitude(fuzzystab::crisp_norm(x), c);
}

double FuzzyNorm::level_cut_magnitude(double r, double c) const {
  require(c > 0.0 && c < 1.0, "level cut requires c in (0,1)");
  switch (kind_) {
    case FuzzyNormKind::RatioInduced:
      return r * c / (1.0 - c);
    case FuzzyNormKind::CrispIndicator:
      return r;
    case FuzzyNormKind::LevelFamily:
      for (const auto& [level, scale] : levels_)
        if (level >= c) return scale * r;
      return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

std::vector<double> SampleGrid::default_thresholds() {
  return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
}

std::vector<double> default_scalars() { return {1.0, -1.0, 2.0, -2.0, 0.5, -0.5, 3.0, -3.0}; }

SampleGrid SampleGrid::defaults(const AlgebraPtr& alg, std::uint64_t probe_seed,
                                std::size_t random_points) {
  SampleGrid grid;
  grid.thresholds = default_thresholds();
  const std::size_t m = alg->dim();
  grid.points.push_back(alg->zero());
  for (std::size_t i = 0; i < m; ++i) grid.points.push_back(alg->basis_element(i));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j)
      grid.points.push_back(alg->basis_element(i) + alg->basis_element(j));
  SplitMix64 rng(probe_seed);
  for (std::size_t n = 0; n < random_points; ++n) {
    std::vector<double> c(m);
    for (double& v : c) v = rng.next_symmetric();
    Element x = alg->element(std::move(c));
    const double norm = crisp_norm(x);
    if (norm > 1.0) x = (1.0 / norm) * x;
    grid.points.push_back(std::move(x));
  }
  grid.validate();
  return grid;
}

void SampleGrid::validate() const {
  require(!points.empty(), "grid points must be nonempty");
  require(!thresholds.empty(), "grid thresholds must be nonempty");
  double prev = 0.0;
  for (double t : thresholds) {
    require(t > prev, "thresholds must be strictly positive and strictly increasing");
    prev = t;
  }
  const bool has_zero =
      std::any_of(points.begin(), points.end(), [](const Element& x) { return x.is_zero(); });
  require(has_zero, "grid points must include the zero element");
}

bool AxiomReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const AxiomEntry& e) { return e.pass; });
}

const AxiomEntry& AxiomReport::entry(const std::string& axiom) const {
  for (const auto& e : entries)
    if (e.axiom == axiom) return e;
  throw std::invalid_argument("no axiom entry named " + axiom);
}

namespace {

void record_failure(AxiomEntry& entry, AxiomWitness w) {
  entry.pass = false;
  ++entry.failure_count;
  if (entry.failures.size() < kWitnessCap) entry.failures.push_back(std::move(w));
}

}  // namespace

AxiomReport check_axioms(const FuzzyNorm& norm, const SampleGrid& grid,
                         const std::vector<double>& scalars) {
  grid.validate();
  AxiomReport report;
  report.point_count = grid.points.size();
  report.threshold_count = grid.thresholds.size();
  report.scalar_count = scalars.size();

  const auto& pts = grid.points;
  const auto& thr = grid.thresholds;
  std::vector<double> norms(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) norms[i] = crisp_norm(pts[i]);

  // N1: value 0 for a <= 0.
  AxiomEntry n1{.axiom = "N1"};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<double> probes{0.0};
    for (double t : thr) probes.push_back(-t);
    for (double a : probes) {
      ++n1.checks;
      const double v = norm.eval(pts[i], a);
      if (v > kSlack) record_failure(n1, {.x_index = i, .a = a, .lhs = v, .rhs = 0.0});
    }
  }
  report.entries.push_back(std::move(n1));

  // N2: value 1 at the zero element for every a > 0, and below 1 somewhere
  // for every nonzero point (probed at the grid thresholds and at ||x||).
  AxiomEntry n2{.axiom = "N2"};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (norms[i] == 0.0) {
      for (double a : thr) {
        ++n2.checks;
        const double v = norm.eval(pts[i], a);
        if (v < 1.0 - kSlack) record_failure(n2, {.x_index = i, .a = a, .lhs = v, .rhs = 1.0});
      }
    } else {
      // "only if" direction: some a > 0 must leave the truth value below 1.
      // Probing near zero works for any norm whose value climbs with a.
      ++n2.checks;
      bool below_one = false;
      for (double a : thr)
        if (norm.eval(pts[i], a) <= 1.0 - 1e-9) below_one = true;
      for (double a : {norms[i], 1e-300})
        if (norm.eval(pts[i], a) <= 1.0 - 1e-9) below_one = true;
      if (!below_one)
        record_failure(n2, {.x_index = i, .a = norms[i], .lhs = 1.0, .rhs = 1.0});
    }
  }
  report.entries.push_back(std::move(n2));

  // N3: N(s x, b) = N(x, b / |s|) for every listed nonzero scalar.
  AxiomEntry n3{.axiom = "N3"};
  if (scalars.empty()) {
    n3.vacuous = true;
    n3.note = "no scalars supplied; N3 passes vacuously";
  }
  for (double s : scalars) {
    if (s == 0.0) continue;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Element sx = s * pts[i];
      for (double b : thr) {
        ++n3.checks;
        const double lhs = norm.eval(sx, b);
        const double rhs = norm.eval(pts[i], b / std::abs(s));
        if (std::abs(lhs - rhs) > kSlack)
          record_failure(n3, {.x_index = i, .scalar = s, .a = b, .lhs = lhs, .rhs = rhs});
      }
    }
  }
  report.entries.push_back(std::move(n3));

  // N4: N(x+y, a+b) >= min{N(x,a), N(y,b)} over all pairs.
  AxiomEntry n4{.axiom = "N4"};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const Element sum = pts[i] + pts[j];
      for (double a : thr) {
        const double vx = norm.eval(pts[i], a);
        for (double b : thr) {
          ++n4.checks;
          const double vy = norm.eval(pts[j], b);
          const double lhs = norm.eval(sum, a + b);
          const double rhs = std::min(vx, vy);
          if (lhs < rhs - kSlack)
            record_failure(n4,
                           {.x_index = i, .y_index = j, .a = a, .b = b, .lhs = lhs, .rhs = rhs});
        }
      }
    }
  }
  report.entries.push_back(std::move(n4));

  // N5: non-decreasing along the threshold grid, and tends to 1 at a large
  // probe threshold.
  AxiomEntry n5{.axiom = "N5"};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double prev = -1.0, prev_a = 0.0;
    for (double a : thr) {
      ++n5.checks;
      const double v = norm.eval(pts[i], a);
      if (v < prev - kSlack)
        record_failure(n5, {.x_index = i, .a = prev_a, .b = a, .lhs = v, .rhs = prev});
      prev = v;
      prev_a = a;
    }
    ++n5.checks;
    const double a_inf = 1e9 * std::max(1.0, norms[i]);
    const double v_inf = norm.eval(pts[i], a_inf);
    if (v_inf < 1.0 - 1e-6)
      record_failure(n5, {.x_index = i, .a = a_inf, .lhs = v_inf, .rhs = 1.0});
  }
  report.entries.push_back(std::move(n5));

  // N6 is only testable as monotone consistency on the grid; full upper
  // semicontinuity has no finite witness.
  AxiomEntry n6{.axiom = "N6"};
  n6.note = "grid-level only";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double prev = -1.0;
    for (double a : thr) {
      ++n6.checks;
      const double v = norm.eval(pts[i], a);
      if (v < -kSlack || v > 1.0 + kSlack || v < prev - kSlack)
        record_failure(n6, {.x_index = i, .a = a, .lhs = v, .rhs = prev});
      prev = v;
    }
  }
  report.entries.push_back(std::move(n6));

  return report;
}

AlgebraConditionReport check_algebra_condition(const FuzzyNorm& norm, const FiniteAlgebra& alg,
                                               const SampleGrid& grid) {
  grid.validate();
  if (norm.carrier().get() != &alg)
    throw std::invalid_argument("fuzzy norm carrier does not match the algebra");

  AlgebraConditionReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  const auto& pts = grid.points;
  const auto& thr = grid.thresholds;

  std::vector<double> norms(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) norms[i] = crisp_norm(pts[i]);

  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double prod_norm = alg.crisp_norm(alg.multiply(pts[i].coeffs(), pts[j].coeffs()));
      AlgebraConditionRow row{.x_index = i, .y_index = j};
      row.min_slack = std::numeric_limits<double>::infinity();
      for (double a : thr) {
        const double vx = norm.eval_magnitude(norms[i], a);
        for (double b : thr) {
          const double vy = norm.eval_magnitude(norms[j], b);
          const double lhs = norm.eval_magnitude(prod_norm, a * b);
          const double rhs = std::min(vx, vy);
          const double slack = lhs - rhs;
          if (slack < row.min_slack) {
            row.min_slack = slack;
            row.worst_a = a;
            row.worst_b = b;
            row.lhs = lhs;
            row.rhs = rhs;
          }
          if (slack < -kSlack) ++report.violations;
        }
      }
      if (row.min_slack < report.min_slack) {
        report.min_slack = row.min_slack;
        report.x_index = i;
        report.y_index = j;
        report.worst_a = row.worst_a;
        report.worst_b = row.worst_b;
      }
      report.rows.push_back(row);
    }
  }
  report.pass = report.violations == 0;
  return report;
}

namespace {

std::size_t tail_start(std::size_t n) { return n - std::max<std::size_t>(1, n / 4); }

}  // namespace

ConvergenceCheck fuzzy_limit_check(const std::vector<Element>& seq, const Element& x,
                                   const FuzzyNorm& norm, const std::vector<double>& thresholds,
                                   double delta) {
  if (seq.empty()) throw std::invalid_argument("fuzzy_limit_check requires a nonempty sequence");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("fuzzy_limit_check requires delta in (0,1)");

  const std::size_t start = tail_start(seq.size());
  for (double a : thresholds) {
    const double last = norm.eval(seq.back() - x, a);
    if (!(last > 1.0 - delta)) {
      return {false, "last iterate has N(x_n - x, " + std::to_string(a) + ") = " +
                         std::to_string(last)};
    }
    double prev = -1.0;
    for (std::size_t n = start; n < seq.size(); ++n) {
      const double v = norm.eval(seq[n] - x, a);
      if (v < prev - kSlack) {
        return {false, "tail not monotone at n=" + std::to_string(n) +
                           ", a=" + std::to_string(a)};
      }
      prev = v;
    }
  }
  return {true, {}};
}

ConvergenceCheck cauchy_check(const std::vector<Element>& seq, const FuzzyNorm& norm,
                              const std::vector<double>& thresholds, double delta) {
  if (seq.empty()) throw std::invalid_argument("cauchy_check requires a nonempty sequence");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("cauchy_check requires delta in (0,1)");

  const std::size_t start = tail_start(seq.size());
  for (std::size_t n = start; n < seq.size(); ++n) {
    for (std::size_t q = n + 1; q < seq.size(); ++q) {
      const Element diff = seq[q] - seq[n];
      for (double a : thresholds) {
        const double v = norm.eval(diff, a);
        if (!(v > 1.0 - delta)) {
          return {false, "pair (" + std::to_string(n) + "," + std::to_string(q) +
                             ") has N = " + std::to_string(v) + " at a=" + std::to_string(a)};
        }
      }
    }
  }
  return {true, {}};
}

}  // namespace fuzzystab
