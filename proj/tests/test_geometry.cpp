#include <cmath>
#include <numbers>

#include "doctest.h"

#include "scx/error.hpp"
#include "scx/geometry.hpp"
#include "scx/random.hpp"

using namespace scx;

TEST_CASE("half-disk membership") {
    const auto d = DomainSpec::unit_half_disk();
    CHECK(d.contains(Vec{0.5, 0.0}, Where::Open));
    CHECK(d.contains(Vec{0.0, 0.5}, Where::Boundary));
    CHECK_FALSE(d.contains(Vec{-0.1, 0.0}, Where::Closure));
    CHECK(d.contains(Vec{0.6, 0.8}, Where::Boundary));
    CHECK_FALSE(d.contains(Vec{0.6, 0.8}, Where::Open));
    CHECK_FALSE(d.contains(Vec{0.5, 0.0}, Where::Boundary));
    CHECK_THROWS_AS(d.contains(Vec{0.5}, Where::Open), InputError);
}

TEST_CASE("level is a signed distance on each face") {
    const auto box = DomainSpec::box(Vec{0.0, 0.0}, Vec{2.0, 1.0});
    CHECK(box.level(Vec{1.0, 0.5}) == doctest::Approx(-0.5));
    CHECK(box.level(Vec{3.0, 0.5}) == doctest::Approx(1.0));
    const auto ball = DomainSpec::ball(Vec{1.0, 1.0, 1.0}, 2.0);
    CHECK(ball.level(Vec{1.0, 1.0, 1.0}) == doctest::Approx(-2.0));
    const auto hs = DomainSpec::half_space(Vec{0.0, 2.0}, 1.0);  // normal normalized: x2 > 0.5
    CHECK(hs.contains(Vec{0.0, 0.6}, Where::Open));
    CHECK(hs.contains(Vec{7.0, 0.5}, Where::Boundary));
}

TEST_CASE("segment_in_closure") {
    const auto d = DomainSpec::unit_half_disk();
    CHECK(segment_in_closure(d, Vec{0.2, 0.5}, Vec{0.5, -0.5}, 64));
    CHECK_FALSE(segment_in_closure(d, Vec{0.5, 0.0}, Vec{-0.5, 0.0}, 64));
    CHECK(segment_in_closure(d, Vec{0.3, 0.1}, Vec{0.3, 0.1}, 64));
    CHECK_THROWS_AS(segment_in_closure(d, Vec{0.3, 0.1}, Vec{0.3, 0.2}, 1), InputError);
}

TEST_CASE("segment_in_closure is monotone under nested probe sets") {
    // Probes of n are a subset of probes of k(n-1)+1.
    const auto d = DomainSpec::unit_half_disk();
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        const Vec a = rng.in_ball(Vec{0.0, 0.0}, 1.2);
        const Vec b = rng.in_ball(Vec{0.0, 0.0}, 1.2);
        if (!segment_in_closure(d, a, b, 9)) {
            CHECK_FALSE(segment_in_closure(d, a, b, 17));
            CHECK_FALSE(segment_in_closure(d, a, b, 33));
        }
    }
}

TEST_CASE("closure_grid membership and covering") {
    const auto d = DomainSpec::unit_half_disk();
    const BallRegion b(Vec{0.0, 0.0}, 1.0);
    const auto g = closure_grid(d, b, 0.5);
    bool has_a = false, has_b = false;
    for (const auto& x : g) {
        CHECK(x[0] >= 0.0);
        CHECK(norm(x) <= 1.0 + 1e-12);
        has_a |= (x == Vec{0.5, 0.0});
        has_b |= (x == Vec{0.0, 0.5});
    }
    CHECK(has_a);
    CHECK(has_b);

    // Covering: random points of the closure are within spacing * sqrt(n) of the grid.
    Rng rng(3);
    int checked = 0;
    while (checked < 1000) {
        const Vec x = rng.in_ball(b.center, b.radius);
        if (!d.contains(x, Where::Closure)) continue;
        ++checked;
        double best = 1e9;
        for (const auto& y : g) best = std::min(best, distance(x, y));
        CHECK(best <= 0.5 * std::sqrt(2.0));
    }

    const auto coarse = closure_grid(d, b, 5.0);
    CHECK(coarse.size() <= 4);
    for (const auto& x : coarse) CHECK(d.contains(x, Where::Closure));
    CHECK(closure_grid(d, BallRegion(Vec{-3.0, 0.0}, 1.0), 0.1).empty());
    CHECK_THROWS_AS(closure_grid(d, b, 0.0), InputError);
}

TEST_CASE("boundary_sample is parametric and exact") {
    const auto d = DomainSpec::unit_half_disk();
    const BallRegion b(Vec{0.0, 0.0}, 1.0);
    const auto s = boundary_sample(d, b, 0.1);
    int flat = 0, arc = 0;
    for (const auto& x : s) {
        CHECK(d.contains(x, Where::Boundary));
        if (x[0] == 0.0 && std::abs(x[1]) < 1.0) ++flat;
        if (std::abs(norm(x) - 1.0) < 1e-12 && x[0] > 0.0) ++arc;
    }
    CHECK(flat > 10);
    CHECK(arc > 10);

    const auto disk = DomainSpec::ball(Vec{0.0, 0.0}, 1.0);
    const auto eight = boundary_sample(disk, BallRegion(Vec{0.0, 0.0}, 2.0), 2.0 * std::numbers::pi / 8.0);
    CHECK(eight.size() == 8);
    for (const auto& x : eight) CHECK(disk.contains(x, Where::Boundary));
}

TEST_CASE("domain JSON round trip") {
    for (const auto& d : {DomainSpec::unit_half_disk(), DomainSpec::box(Vec{0.0}, Vec{1.0}),
                          DomainSpec::ball(Vec{1.0, 2.0, 3.0}, 0.5), DomainSpec::half_space(Vec{1.0, 0.0}, 0.25)}) {
        const auto back = DomainSpec::from_json(d.to_json());
        CHECK(back.to_json() == d.to_json());
    }
    CHECK_THROWS_AS(DomainSpec::from_json({{"kind", "torus"}}), InputError);
    CHECK_THROWS_AS(BallRegion(Vec{0.0}, 0.0), InputError);
}
