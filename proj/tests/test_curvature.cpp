#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <cmath>

#include "mengerlab/curvature.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mengerlab;
using namespace mengerlab::testing;

namespace {

DiscreteMeasure equilateral_measure() {
    return DiscreteMeasure({vec2(0, 0), vec2(1, 0), vec2(0.5, std::sqrt(3.0) / 2)},
                           {1.0, 1.0, 1.0}, 1);
}

double k1_squared(const std::vector<Vector>& t) {
    return std::pow(evaluate(IntegrandKind::K1, t), 1.0);
}

}  // namespace

TEST_CASE("exact curvature: hand-enumerated values") {
    {
        GenerateParams p;
        p.kind = "segment";
        p.n_points = 40;
        const CurvatureEstimate est = curvature_exact(generate(p, 1), IntegrandKind::K1, 2.0);
        CHECK(est.value == 0.0);
        CHECK(est.method == CurvatureMethod::Exact);
    }
    {
        // 27 ordered triples; the 6 distinct orderings each contribute (sqrt(3)/4)^2
        const CurvatureEstimate est = curvature_exact(equilateral_measure(), IntegrandKind::K1, 2.0);
        CHECK(est.value == doctest::Approx(1.125).epsilon(1e-12));
        CHECK(est.tuples_evaluated == 6);
    }
}

TEST_CASE("exact curvature scales like s^n under the joint scaling") {
    GenerateParams p;
    p.kind = "four_corner_cantor";
    p.depth = 2;
    const DiscreteMeasure mu = generate(p, 1);
    const double base = curvature_exact(mu, IntegrandKind::K1, 2.0).value;
    for (double s : {0.1, 3.0, 10.0}) {
        const double moved = curvature_exact(mu.scaled(s), IntegrandKind::K1, 2.0).value;
        CHECK(std::abs(moved - s * base) <= 1e-10 * std::max(std::abs(moved), s * base));
    }
}

TEST_CASE("parallel kernel agrees with the serial reference and the enumeration oracle") {
    GenerateParams p;
    p.kind = "four_corner_cantor";
    p.depth = 2;
    const DiscreteMeasure mu = generate(p, 1);
    const auto kernel = plain_kernel(IntegrandKind::K1, 2.0);
    const CurvatureEstimate par = curvature_exact(mu, kernel);
    const CurvatureEstimate ser = curvature_exact_serial(mu, kernel);
    CHECK(par.value == doctest::Approx(ser.value).epsilon(1e-13));
    CHECK(par.tuples_evaluated == ser.tuples_evaluated);

    // block-ascending reduction: bit-identical at any thread count
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const double one = curvature_exact(mu, IntegrandKind::K1, 2.0).value;
    omp_set_num_threads(std::max(4, saved));
    const double many = curvature_exact(mu, IntegrandKind::K1, 2.0).value;
    omp_set_num_threads(saved);
    CHECK(one == many);

    DiscreteMeasure small({vec2(0, 0), vec2(1, 0.2), vec2(0.3, 0.9), vec2(-0.4, 0.5)},
                          {0.2, 0.3, 0.1, 0.4}, 1);
    const double oracle = curvature_enumeration_oracle(
        small, 2.0, [](const std::vector<Vector>& t) { return evaluate(IntegrandKind::K1, t); });
    CHECK(curvature_exact(small, IntegrandKind::K1, 2.0).value ==
          doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("tuple cap raises TooLarge") {
    GenerateParams p;
    p.kind = "segment";
    p.n_points = 50;
    const DiscreteMeasure mu = generate(p, 1);
    CHECK_THROWS_AS(curvature_exact(mu, IntegrandKind::K1, 2.0, 1000), TooLarge);
}

TEST_CASE("symmetrizing the integrand does not change the exact sum") {
    GenerateParams p;
    p.kind = "four_corner_cantor";
    p.depth = 2;
    const DiscreteMeasure mu = generate(p, 1);
    for (auto kind : {IntegrandKind::K1, IntegrandKind::K6}) {
        const double pexp = default_exponent(kind, 1);
        const double plain = curvature_exact(mu, kind, pexp).value;
        const double sym = curvature_exact(mu, symmetrized_kernel(kind, 1, pexp)).value;
        CHECK(std::abs(plain - sym) <= 1e-10 * std::max(plain, 1e-30));
    }
    {
        // n = 2: 24 orderings per tuple
        GenerateParams q;
        q.kind = "cantor_product";
        q.ambient_dim = 3;
        q.intrinsic_dim = 2;
        q.depth = 1;
        const DiscreteMeasure mu2 = generate(q, 1);
        const double pexp = default_exponent(IntegrandKind::K6, 2);
        const double plain = curvature_exact(mu2, IntegrandKind::K6, pexp).value;
        const double sym = curvature_exact(mu2, symmetrized_kernel(IntegrandKind::K6, 2, pexp)).value;
        CHECK(std::abs(plain - sym) <= 1e-10 * std::max(plain, 1e-30));
    }
}

TEST_CASE("exact curvature is translation invariant") {
    GenerateParams p;
    p.kind = "four_corner_cantor";
    p.depth = 2;
    const DiscreteMeasure mu = generate(p, 1);
    const double base = curvature_exact(mu, IntegrandKind::K1, 2.0).value;
    Vector shift = vec2(17.0, -4.0);
    const double moved = curvature_exact(mu.translated(shift), IntegrandKind::K1, 2.0).value;
    CHECK(std::abs(base - moved) <= 1e-10 * base);
}

TEST_CASE("monte carlo: determinism, zero case, convergence") {
    {
        GenerateParams p;
        p.kind = "segment";
        p.n_points = 64;
        const CurvatureEstimate est = curvature_mc(generate(p, 1), IntegrandKind::K1, 2.0, 2000, 3);
        CHECK(est.value == 0.0);
        CHECK(est.stderr_ == 0.0);
    }
    {
        // same seed, different thread counts: bit identical
        GenerateParams p;
        p.kind = "four_corner_cantor";
        p.depth = 3;
        const DiscreteMeasure mu = generate(p, 1);
        const int saved = omp_get_max_threads();
        omp_set_num_threads(1);
        const CurvatureEstimate one = curvature_mc(mu, IntegrandKind::K1, 2.0, 20000, 5);
        omp_set_num_threads(std::max(2, saved));
        const CurvatureEstimate many = curvature_mc(mu, IntegrandKind::K1, 2.0, 20000, 5);
        omp_set_num_threads(saved);
        CHECK(one.value == many.value);
        CHECK(one.stderr_ == many.stderr_);
        const CurvatureEstimate serial = curvature_mc_serial(mu, IntegrandKind::K1, 2.0, 20000, 5);
        CHECK(serial.value == one.value);
    }
    {
        // stderr shrinks like 1/sqrt(M) within 20%
        GenerateParams p;
        p.kind = "four_corner_cantor";
        p.depth = 3;
        const DiscreteMeasure mu = generate(p, 1);
        const double e3 = curvature_mc(mu, IntegrandKind::K1, 2.0, 1000, 11).stderr_;
        const double e4 = curvature_mc(mu, IntegrandKind::K1, 2.0, 10000, 11).stderr_;
        const double e5 = curvature_mc(mu, IntegrandKind::K1, 2.0, 100000, 11).stderr_;
        CHECK(e3 / e4 == doctest::Approx(std::sqrt(10.0)).epsilon(0.2));
        CHECK(e4 / e5 == doctest::Approx(std::sqrt(10.0)).epsilon(0.2));
    }
    {
        // unbiasedness against the exact value on the equilateral triple
        const DiscreteMeasure mu = equilateral_measure();
        int within = 0;
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            const CurvatureEstimate est = curvature_mc(mu, IntegrandKind::K1, 2.0, 20000, seed);
            if (std::abs(est.value - 1.125) <= 3.0 * est.stderr_) ++within;
        }
        CHECK(within >= 36);
    }
    CHECK_THROWS_AS(curvature_mc(equilateral_measure(), IntegrandKind::K1, 2.0, 50, 1),
                    BadParams);
}

TEST_CASE("localized curvature") {
    const DiscreteMeasure mu = equilateral_measure();
    const Vector centroid = vec2(0.5, std::sqrt(3.0) / 6.0);
    {
        // separation demand above the diameter: nothing is admissible
        CHECK(curvature_local(mu, IntegrandKind::K1, 2.0, {centroid, 10.0, 1.5}) == 0.0);
    }
    {
        // all six orderings admissible: the full exact value
        const double v = curvature_local(mu, IntegrandKind::K1, 2.0, {centroid, 0.5, 4.0});
        CHECK(v == doctest::Approx(1.125).epsilon(1e-12));
    }
    {
        // restriction never exceeds the exact sum over the covering ball
        GenerateParams p;
        p.kind = "four_corner_cantor";
        p.depth = 2;
        const DiscreteMeasure cantor = generate(p, 1);
        const double local =
            curvature_local(cantor, IntegrandKind::K1, 2.0, {cantor.point(0), 0.3, 3.0});
        const double full = curvature_exact(cantor, IntegrandKind::K1, 2.0).value;
        CHECK(local <= full + 1e-15);
    }
}
