#include <doctest.h>

#include <cmath>
#include <limits>

#include "fuzzystab/control.hpp"
#include "fuzzystab/rng.hpp"

using namespace fuzzystab;

namespace {

AlgebraPtr reals() { return make_matrix_algebra(1); }

ControlFunction powersum_half(const AlgebraPtr& alg, double eps = 0.1) {
  return ControlFunction::power_sum(eps, 0.5, alg, FuzzyNorm::ratio_induced(alg));
}

}  // namespace

TEST_CASE("phi magnitudes") {
  const AlgebraPtr r = reals();
  const Element one = r->element({1.0});
  const Element zero = r->zero();

  const ControlFunction constant =
      ControlFunction::constant(0.1, r, FuzzyNorm::ratio_induced(r));
  CHECK(constant.magnitude(one, zero) == 0.1);
  CHECK(constant.magnitude(zero, zero) == 0.1);

  const ControlFunction powersum = powersum_half(r);
  CHECK(powersum.magnitude(one, one) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(powersum.magnitude(zero, zero) == 0.0);

  SUBCASE("negative exponents return the +inf sentinel at zero arguments") {
    const ControlFunction neg =
        ControlFunction::power_sum(0.1, -1.0, r, FuzzyNorm::ratio_induced(r));
    CHECK(neg.magnitude(zero, one) == std::numeric_limits<double>::infinity());
    CHECK(neg.magnitude(one, zero) == std::numeric_limits<double>::infinity());
    CHECK(neg.magnitude(one, one) == doctest::Approx(0.2));
  }
}

TEST_CASE("control constructor invariants") {
  const AlgebraPtr r = reals();
  const FuzzyNorm nprime = FuzzyNorm::ratio_induced(r);

  SUBCASE("power sums derive alpha from the exponent") {
    CHECK(powersum_half(r).alpha() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(powersum_half(r).scaling_direction() == ScalingDirection::Doubling);
    const ControlFunction quad = ControlFunction::power_sum(0.1, 2.0, r, nprime);
    CHECK(quad.alpha() == 1.0);  // 2^(2-p)
    CHECK(quad.scaling_direction() == ScalingDirection::Halving);
    CHECK(ControlFunction::power_sum(0.1, 3.0, r, nprime).alpha() == 0.5);
  }

  SUBCASE("the doubling factor 2^p for p > 1 is rejected as a scaling constant") {
    try {
      ControlFunction::power_sum(0.1, 1.5, r, nprime, std::exp2(1.5));
      FAIL("expected rejection of alpha = 2^1.5");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("0 < alpha < 2") != std::string::npos);
    }
  }

  SUBCASE("explicit alphas must match the derived factor") {
    CHECK_NOTHROW(ControlFunction::power_sum(0.1, 0.5, r, nprime, std::sqrt(2.0)));
    CHECK_THROWS_AS(ControlFunction::power_sum(0.1, 0.5, r, nprime, 1.0),
                    std::invalid_argument);
  }

  SUBCASE("p = 1 and bad eps are rejected") {
    CHECK_THROWS_AS(ControlFunction::power_sum(0.1, 1.0, r, nprime), std::invalid_argument);
    CHECK_THROWS_AS(ControlFunction::power_sum(0.0, 0.5, r, nprime), std::invalid_argument);
    CHECK_THROWS_AS(ControlFunction::power_sum(-0.1, 0.5, r, nprime), std::invalid_argument);
  }

  SUBCASE("constant controls need alpha in [1, 2)") {
    CHECK_NOTHROW(ControlFunction::constant(0.1, r, nprime));
    CHECK_NOTHROW(ControlFunction::constant(0.1, r, nprime, 1.5));
    CHECK_THROWS_AS(ControlFunction::constant(0.1, r, nprime, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(ControlFunction::constant(0.1, r, nprime, 2.0), std::invalid_argument);
  }
}

TEST_CASE("scaling hypothesis on the grid") {
  const AlgebraPtr r = reals();
  const SampleGrid grid = SampleGrid::defaults(r, 11);

  SUBCASE("power sums scale with zero slack") {
    const ScalingReport report = check_scaling(powersum_half(r), grid);
    CHECK(report.pass);
    CHECK(report.direction == ScalingDirection::Doubling);
    for (const auto& row : report.rows) CHECK(std::abs(row.crisp_slack) <= 1e-12);
  }

  SUBCASE("constant with alpha 1 is an equality, larger alphas leave slack") {
    const FuzzyNorm nprime = FuzzyNorm::ratio_induced(r);
    const ScalingReport tight =
        check_scaling(ControlFunction::constant(0.1, r, nprime, 1.0), grid);
    CHECK(tight.pass);
    CHECK(tight.min_crisp_slack == doctest::Approx(0.0));
    const ScalingReport loose =
        check_scaling(ControlFunction::constant(0.1, r, nprime, 1.5), grid);
    CHECK(loose.pass);
    CHECK(loose.min_crisp_slack == doctest::Approx(0.05));
  }

  SUBCASE("reverse scaling for p > 1 is certified with zero slack") {
    const ControlFunction quad =
        ControlFunction::power_sum(0.1, 2.0, r, FuzzyNorm::ratio_induced(r));
    const ScalingReport report = check_scaling(quad, grid);
    CHECK(report.pass);
    CHECK(report.direction == ScalingDirection::Halving);
    for (const auto& row : report.rows) CHECK(std::abs(row.crisp_slack) <= 1e-12);
  }

  SUBCASE("negative exponents skip the sentinel pairs") {
    const ControlFunction neg =
        ControlFunction::power_sum(0.1, -1.0, r, FuzzyNorm::ratio_induced(r));
    const ScalingReport report = check_scaling(neg, grid);
    CHECK(report.pass);
    CHECK(report.skipped > 0);
  }
}

// For ratio-induced codomain norms the fuzzy comparison N'(u,t) >= N'(v,t)
// for all t > 0 is equivalent to |u| <= |v|; this is what justifies reducing
// every fuzzy domination check to a crisp one.
TEST_CASE("monotone reduction soundness for ratio norms") {
  const AlgebraPtr r = reals();
  const FuzzyNorm nprime = FuzzyNorm::ratio_induced(r);
  const std::vector<double> thresholds = SampleGrid::default_thresholds();
  SplitMix64 rng(2718);
  for (int trial = 0; trial < 300; ++trial) {
    const double u = 3.0 * rng.next_unit();
    const double v = 3.0 * rng.next_unit();
    bool fuzzy_dominates = true;
    for (double t : thresholds)
      fuzzy_dominates = fuzzy_dominates && nprime.eval_magnitude(u, t) >= nprime.eval_magnitude(v, t);
    CHECK(fuzzy_dominates == (u <= v));
  }
}

TEST_CASE("realized maps") {
  const AlgebraPtr r = reals();
  const FuzzyNorm norm = FuzzyNorm::ratio_induced(r);
  const ControlFunction constant = ControlFunction::constant(0.1, r, norm);
  const Element one = r->element({1.0});

  SUBCASE("zero noise gives the base map exactly") {
    const ApproximateMap map(LinearMap::identity(r), 42, 0.0, PerturbMode::Homomorphism,
                             NoiseDirection::Hashed, constant, norm);
    CHECK(map.realize(one).coeffs() == one.coeffs());
    CHECK(map.realize(r->zero()).is_zero());
  }

  SUBCASE("noise stays inside the construction budget") {
    const ApproximateMap map(LinearMap::identity(r), 42, 0.05, PerturbMode::Homomorphism,
                             NoiseDirection::Hashed, constant, norm);
    const double fx = map.realize(one).coeffs()[0];
    CHECK(fx >= 0.95);
    CHECK(fx <= 1.05);
    CHECK(map.realize(r->zero()).is_zero());  // eta(0) = 0
  }

  SUBCASE("noise magnitude is exactly min(noise_scale, phi(a,a)/2)") {
    const AlgebraPtr mat = make_matrix_algebra(2);
    const FuzzyNorm mnorm = FuzzyNorm::ratio_induced(mat);
    const ControlFunction ctrl =
        ControlFunction::power_sum(0.1, 0.5, mat, mnorm);
    const ApproximateMap map(LinearMap::identity(mat), 7, 0.03, PerturbMode::Homomorphism,
                             NoiseDirection::Hashed, ctrl, mnorm);
    SplitMix64 rng(55);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> c(4);
      for (double& v : c) v = 2.0 * rng.next_symmetric();
      const Element a = mat->element(std::move(c));
      if (a.is_zero()) continue;
      const double expected = std::min(0.03, 0.5 * ctrl.magnitude(a, a));
      CHECK(crisp_norm(map.noise(a)) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  SUBCASE("same seed and point give bit-identical outputs") {
    const ApproximateMap map(LinearMap::identity(r), 42, 0.05, PerturbMode::Homomorphism,
                             NoiseDirection::Hashed, constant, norm);
    const ApproximateMap again(LinearMap::identity(r), 42, 0.05, PerturbMode::Homomorphism,
                               NoiseDirection::Hashed, constant, norm);
    SplitMix64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
      const Element a = r->element({5.0 * rng.next_symmetric()});
      CHECK(map.realize(a).coeffs() == again.realize(a).coeffs());
    }
    const ApproximateMap reseeded(LinearMap::identity(r), 43, 0.05, PerturbMode::Homomorphism,
                                  NoiseDirection::Hashed, constant, norm);
    bool any_different = false;
    for (int trial = 0; trial < 50; ++trial) {
      const Element a = r->element({double(trial + 1)});
      any_different = any_different || map.realize(a).coeffs() != reseeded.realize(a).coeffs();
    }
    CHECK(any_different);
  }

  SUBCASE("fixed direction on the reals adds a signed power of the norm") {
    const ControlFunction ps = powersum_half(r);
    const ApproximateMap map(LinearMap::identity(r), 0, 1.0, PerturbMode::Homomorphism,
                             NoiseDirection::Fixed, ps, norm);
    for (double x : {0.25, 1.0, 2.0}) {
      const Element fx = map.realize(r->element({x}));
      CHECK(fx.coeffs()[0] == doctest::Approx(x + 0.1 * std::sqrt(x)).epsilon(1e-15));
    }
  }
}

TEST_CASE("defect domination") {
  const AlgebraPtr r = reals();
  const FuzzyNorm norm = FuzzyNorm::ratio_induced(r);
  const ControlFunction constant = ControlFunction::constant(0.1, r, norm);
  const SampleGrid grid = SampleGrid::defaults(r, 2024);

  SUBCASE("the noise-free map passes with left side 1") {
    const ApproximateMap map(LinearMap::identity(r), 1, 0.0, PerturbMode::Homomorphism,
                             NoiseDirection::Hashed, constant, norm);
    const DominationReport report = certify_defect_domination(map, grid);
    CHECK(report.pass);
    CHECK(report.max_additive_defect <= 1e-15);  // rounding of (a+b) - a - b only
    CHECK(report.max_product_defect <= 1e-15);
  }

  SUBCASE("construction-compliant noise passes after retries") {
    const ApproximateMap map = make_certified_map(
        LinearMap::identity(r), 42, 0.05, PerturbMode::Homomorphism, NoiseDirection::Hashed,
        constant, norm, grid);
    CHECK(map.noise_scale() <= 0.05);
    CHECK(map.noise_scale() > 0.0);
    CHECK(certify_defect_domination(map, grid).pass);
  }

  SUBCASE("inflated noise fails with a witness pair") {
    const ApproximateMap map(LinearMap::identity(r), 42, 5.0, PerturbMode::Homomorphism,
                             NoiseDirection::Hashed, constant, norm);
    const DominationReport report = certify_defect_domination(map, grid);
    CHECK(!report.pass);
    const std::size_t idx = report.x_index * grid.points.size() + report.y_index;
    CHECK(!report.rows[idx].ok);
  }

  SUBCASE("an impossible budget exhausts the retries") {
    // Fixed direction pins the noise at eps/2 regardless of halving, and the
    // pair (2, 2) then breaks the product inequality on every attempt.
    CHECK_THROWS_AS(make_certified_map(LinearMap::identity(r), 1, 1e6,
                                       PerturbMode::Homomorphism, NoiseDirection::Fixed, constant,
                                       norm, grid),
                    std::runtime_error);
  }

  SUBCASE("additive-only scope ignores product defects") {
    const ApproximateMap map = make_certified_map(
        LinearMap::identity(r), 1, 1e6, PerturbMode::Homomorphism, NoiseDirection::Fixed,
        constant, norm, grid, DominationScope::AdditiveOnly);
    const DominationReport report =
        certify_defect_domination(map, grid, DominationScope::AdditiveOnly);
    CHECK(report.pass);
    CHECK(report.max_additive_defect <= 0.1 + 1e-12);
  }

  SUBCASE("derivation mode certifies the Leibniz defect") {
    const AlgebraPtr poly = make_poly_trunc_algebra(2);
    const FuzzyNorm pnorm = FuzzyNorm::ratio_induced(poly);
    const ControlFunction ctrl = ControlFunction::power_sum(0.05, 0.5, poly, pnorm);
    const SampleGrid pgrid = SampleGrid::defaults(poly, 9);
    const ApproximateMap map = make_certified_map(
        LinearMap::euler_derivation(poly), 11, 1e-4, PerturbMode::Derivation,
        NoiseDirection::Hashed, ctrl, pnorm, pgrid);
    const DominationReport report = certify_defect_domination(map, pgrid);
    CHECK(report.pass);
    CHECK(report.max_product_defect <= 0.05 * 2.0 * std::sqrt(2.0) + 1e-9);
  }
}
