#include "stig/rng.hpp"
#include "stig/smf.hpp"

#include <doctest.h>

#include <cmath>

using namespace stig;

TEST_CASE("smf boundary and midpoint identities") {
    const SmfParams p{0.2, 0.8};
    CHECK(std::abs(smf(0.2, p) - 0.0) <= 1e-12);
    CHECK(std::abs(smf(0.8, p) - 1.0) <= 1e-12);
    CHECK(std::abs(smf(0.5, p) - 0.5) <= 1e-12);
    // Flat tails.
    CHECK(smf(-1.0, p) == 0.0);
    CHECK(smf(0.05, p) == 0.0);
    CHECK(smf(0.95, p) == 1.0);
    CHECK(smf(2.0, p) == 1.0);
}

TEST_CASE("smf quadratic branch value") {
    // 2*((0.35-0.2)/0.6)^2 = 2*(0.25)^2 = 0.125
    const SmfParams p{0.2, 0.8};
    CHECK(smf(0.35, p) == doctest::Approx(0.125).epsilon(1e-12));
    // Upper branch mirror: smf(0.65) = 1 - 2*((0.65-0.8)/0.6)^2 = 0.875
    CHECK(smf(0.65, p) == doctest::Approx(0.875).epsilon(1e-12));
}

TEST_CASE("smf is monotone, continuous and within [0,1] on random params") {
    Rng rng(1234);
    for (int it = 0; it < 10000; ++it) {
        const double a = rng.uniform(0.0, 0.9);
        const double b = a + rng.uniform(0.01, 1.0 - a);
        const SmfParams p{a, b};
        const double x = rng.uniform(-0.2, 1.2);
        const double y = rng.uniform(-0.2, 1.2);
        const double fx = smf(x, p);
        const double fy = smf(y, p);
        CHECK(fx >= 0.0);
        CHECK(fx <= 1.0);
        if (x <= y) {
            CHECK(fx <= fy);
        } else {
            CHECK(fy <= fx);
        }
        // Continuity probe around the knots.
        const double eps = 1e-9;
        CHECK(std::abs(smf(a + eps, p) - smf(a - eps, p)) < 1e-6);
        CHECK(std::abs(smf(b + eps, p) - smf(b - eps, p)) < 1e-6);
        const double mid = 0.5 * (a + b);
        CHECK(std::abs(smf(mid + eps, p) - smf(mid - eps, p)) < 1e-6);
    }
}

TEST_CASE("smf params validation") {
    CHECK_THROWS_AS((SmfParams{0.5, 0.5}.validate("marking", 0.0, 1.0)), ConfigError);
    CHECK_THROWS_AS((SmfParams{0.8, 0.2}.validate("marking", 0.0, 1.0)), ConfigError);
    CHECK_THROWS_AS((SmfParams{-0.1, 0.5}.validate("marking", 0.0, 1.0)), ConfigError);
    CHECK_THROWS_AS((SmfParams{0.1, 1.5}.validate("marking", 0.0, 1.0)), ConfigError);
    CHECK_NOTHROW((SmfParams{0.0, 1.0}.validate("marking", 0.0, 1.0)));
    CHECK_NOTHROW((SmfParams{0.15, 0.75}.validate("prototyping", 0.0, 1.0 / 0.35)));
}
