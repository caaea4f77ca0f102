#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mengerlab/integrand.hpp"
#include "mengerlab/kernel_eval.hpp"
#include "test_support.hpp"

using namespace mengerlab;
using namespace mengerlab::testing;

namespace {

std::vector<Vector> equilateral_tuple(double side = 1.0) {
    return {vec2(0, 0), vec2(side, 0), vec2(side / 2, side * std::sqrt(3.0) / 2)};
}

std::vector<Vector> tetrahedron_tuple() {
    return {vec3(0, 0, 0), vec3(1, 0, 0), vec3(0.5, std::sqrt(3.0) / 2, 0),
            vec3(0.5, std::sqrt(3.0) / 6, std::sqrt(2.0 / 3.0))};
}

// Oracle: inverse circumradius from side lengths, c = 4 * area / (a b c).
double inverse_circumradius(const Vector& x, const Vector& y, const Vector& z) {
    const double a = (x - y).norm(), b = (y - z).norm(), c = (z - x).norm();
    const double s = 0.5 * (a + b + c);
    const double area = std::sqrt(std::max(0.0, s * (s - a) * (s - b) * (s - c)));
    return 4.0 * area / (a * b * c);
}

}  // namespace

TEST_CASE("degenerate tuples") {
    CHECK(is_degenerate_tuple({vec2(0, 0), vec2(1, 1), vec2(1, 1)}));
    CHECK(!is_degenerate_tuple(equilateral_tuple()));
    CHECK(is_degenerate_tuple({vec2(0, 0), vec2(1, 0), vec2(2, 0)}));
}

TEST_CASE("closed-form kernel values") {
    CHECK(evaluate(IntegrandKind::K1, equilateral_tuple()) ==
          doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-12));
    for (auto kind : {IntegrandKind::K1, IntegrandKind::K2, IntegrandKind::K3,
                      IntegrandKind::K4, IntegrandKind::K5, IntegrandKind::K6})
        CHECK(evaluate(kind, {vec2(0, 0), vec2(1, 0), vec2(2, 0)}) == 0.0);
    CHECK(evaluate(IntegrandKind::K5, tetrahedron_tuple()) ==
          doctest::Approx(std::sqrt(2.0) / 12).epsilon(1e-12));

    // unit equilateral triangle, worked by hand:
    //   K2^2 = (1/3) * (2 * sqrt(3)/4)^2 / 1 * 3       -> K2 = sqrt(3)/2
    //   K3   = (sqrt(3)/4) / diam^3                    -> sqrt(3)/4
    //   K4   = (sqrt(3)/4) / (3 * 1)                   -> sqrt(3)/12
    //   K6   = height / (1 * 1) = sqrt(3)/2 (half the inverse circumradius)
    CHECK(evaluate(IntegrandKind::K2, equilateral_tuple()) ==
          doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
    CHECK(evaluate(IntegrandKind::K3, equilateral_tuple()) ==
          doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-12));
    CHECK(evaluate(IntegrandKind::K4, equilateral_tuple()) ==
          doctest::Approx(std::sqrt(3.0) / 12).epsilon(1e-12));
    CHECK(evaluate(IntegrandKind::K6, equilateral_tuple()) ==
          doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
}

TEST_CASE("K1 equals a quarter of the inverse circumradius") {
    RngStream rng(31, 0);
    int done = 0;
    for (int trial = 0; trial < 4000 && done < 1000; ++trial) {
        std::vector<Vector> tri{random_vector(rng, 2, 2.0), random_vector(rng, 2, 2.0),
                                random_vector(rng, 2, 2.0)};
        if (is_degenerate_tuple(tri)) continue;
        const double c = inverse_circumradius(tri[0], tri[1], tri[2]);
        const double k1 = evaluate(IntegrandKind::K1, tri);
        CHECK(std::abs(k1 - c / 4.0) <= 1e-10 * c);
        ++done;
    }
    CHECK(done == 1000);
}

TEST_CASE("kernels are nonnegative and translation invariant") {
    RngStream rng(32, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_index(2));
        const int dim = n + 1 + static_cast<int>(rng.uniform_index(2));
        std::vector<Vector> tuple;
        for (int i = 0; i < n + 2; ++i) tuple.push_back(random_vector(rng, dim, 2.0));
        const Vector shift = random_vector(rng, dim, 2.0);
        std::vector<Vector> moved = tuple;
        for (auto& v : moved) v += shift;
        for (auto kind : {IntegrandKind::K1, IntegrandKind::K2, IntegrandKind::K3,
                          IntegrandKind::K4, IntegrandKind::K5, IntegrandKind::K6}) {
            const double base = evaluate(kind, tuple);
            CHECK(base >= 0.0);
            CHECK(std::abs(evaluate(kind, moved) - base) <= 1e-10 * std::max(base, 1e-30));
        }
    }
}

TEST_CASE("symmetrized kernels") {
    RngStream rng(33, 0);
    {
        // already symmetric: the average changes nothing
        auto sym = symmetrize(IntegrandKind::K1, 1, 2.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Vector> t{random_vector(rng, 2, 1.0), random_vector(rng, 2, 1.0),
                                  random_vector(rng, 2, 1.0)};
            const double plain = evaluate(IntegrandKind::K1, t);
            CHECK(std::abs(sym(t) - plain) <= 1e-12 * std::max(plain, 1e-30));
        }
    }
    {
        // K6 at n=1: direct six-term average oracle
        auto sym = symmetrize(IntegrandKind::K6, 1, 2.0);
        std::vector<Vector> t{vec2(0, 0), vec2(1.2, 0.1), vec2(0.4, 0.9)};
        std::vector<int> order{0, 1, 2};
        double acc = 0.0;
        int count = 0;
        do {
            std::vector<Vector> perm{t[static_cast<size_t>(order[0])],
                                     t[static_cast<size_t>(order[1])],
                                     t[static_cast<size_t>(order[2])]};
            acc += std::pow(evaluate(IntegrandKind::K6, perm), 2.0);
            ++count;
        } while (std::next_permutation(order.begin(), order.end()));
        CHECK(count == 6);
        CHECK(sym(t) == doctest::Approx(std::sqrt(acc / 6.0)).epsilon(1e-12));

        // invariance under any input ordering
        std::vector<int> reorder{2, 0, 1};
        std::vector<Vector> shuffled{t[2], t[0], t[1]};
        CHECK(sym(shuffled) == doctest::Approx(sym(t)).epsilon(1e-12));
    }
    {
        auto sym = symmetrize(IntegrandKind::K6, 1, 2.0);
        CHECK(sym({vec2(0, 0), vec2(1, 0), vec2(2, 0)}) == 0.0);
    }
    CHECK_THROWS_AS(symmetrize(IntegrandKind::K1, 7, 2.0), TooLargeN);
}

TEST_CASE("propriety report: scaling law holds at the natural exponent") {
    {
        auto rep = check_propriety(IntegrandKind::K1, 2.0, 1, 2, 300, 41);
        CHECK(rep.scaling_ok);
        CHECK(rep.translation_ok);
        CHECK(rep.scaling_violation <= 1e-9);
    }
    {
        auto rep = check_propriety(IntegrandKind::K5, 2.0, 1, 3, 300, 42);  // n(n+1) = 2 at n=1
        CHECK(rep.scaling_ok);
    }
    {
        // wrong exponent: the homogeneity mismatch must be flagged
        auto rep = check_propriety(IntegrandKind::K1, 3.0, 1, 2, 300, 43);
        CHECK(!rep.scaling_ok);
        CHECK(rep.scaling_violation > 1e-3);
    }
    {
        // the simplex lower-bound fit produces usable constants
        auto rep = check_propriety(IntegrandKind::K1, 2.0, 1, 2, 60, 44);
        CHECK(rep.tested_C.size() >= 2);
        CHECK(rep.fitted_c > 0.0);
    }
}

TEST_CASE("fast kernel path matches the reference evaluation for all kinds") {
    RngStream rng(34, 0);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_index(2));
        const int dim = n + 1 + static_cast<int>(rng.uniform_index(2));
        std::vector<Vector> tuple;
        for (int i = 0; i < n + 2; ++i) tuple.push_back(random_vector(rng, dim, 2.0));
        std::vector<const double*> pts;
        for (const auto& v : tuple) pts.push_back(v.data());
        for (auto kind : {IntegrandKind::K1, IntegrandKind::K2, IntegrandKind::K3,
                          IntegrandKind::K4, IntegrandKind::K5, IntegrandKind::K6}) {
            const KernelWorkspace fast(kind, n, dim, 2.0);
            const double a = fast.value(pts.data());
            const double b = evaluate(kind, tuple);
            CHECK(std::abs(a - b) <= 1e-10 * std::max({a, b, 1e-30}));
        }
    }
}

TEST_CASE("default exponents per kind") {
    CHECK(default_exponent(IntegrandKind::K1, 2) == 2.0);
    CHECK(default_exponent(IntegrandKind::K4, 2) == 6.0);
    CHECK(default_exponent(IntegrandKind::K5, 1) == 2.0);
    CHECK(default_exponent(IntegrandKind::K6, 2) == 3.0);
}
