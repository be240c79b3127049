#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"

#include "scx/error.hpp"
#include "scx/gradients.hpp"
#include "scx/random.hpp"

using namespace scx;

namespace {
const DomainSpec kHalfDisk = DomainSpec::unit_half_disk();

std::vector<Vec> arc_left(int n) {
    std::vector<Vec> s;
    for (int i = 0; i <= n; ++i) {
        const double t = std::numbers::pi / 2 + std::numbers::pi * i / n;
        s.push_back(Vec{std::cos(t), std::sin(t)});
    }
    return s;
}

double dist_to_set(const Vec& p, const std::vector<Vec>& s) {
    double best = 1e300;
    for (const auto& q : s) best = std::min(best, distance(p, q));
    return best;
}
}  // namespace

TEST_CASE("convex hull examples") {
    const std::vector<Vec> seg{Vec{0.0, 1.0}, Vec{0.0, -1.0}};
    const auto h1 = convex_hull(seg);
    CHECK(h1.affine_dim == 1);
    CHECK(h1.vertices.size() == 2);

    std::vector<Vec> arc;
    for (int i = 0; i < 32; ++i) {
        const double t = std::numbers::pi / 2 + std::numbers::pi * i / 31.0;
        arc.push_back(Vec{std::cos(t), std::sin(t)});
    }
    const auto h2 = convex_hull(arc);
    CHECK(h2.affine_dim == 2);
    REQUIRE(h2.vertices.size() == 32);
    // Counterclockwise: positive signed area of consecutive triples.
    for (std::size_t i = 0; i < 32; ++i) {
        const Vec& a = h2.vertices[i];
        const Vec& b = h2.vertices[(i + 1) % 32];
        const Vec& c = h2.vertices[(i + 2) % 32];
        CHECK((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) > 0.0);
    }

    const std::vector<Vec> tri{Vec{0.0, 0.0}, Vec{1.0, 0.0}, Vec{0.0, 1.0}, Vec{0.2, 0.2}};
    const auto h3 = convex_hull(tri);
    CHECK(h3.vertices.size() == 3);
    CHECK(std::find(h3.vertices.begin(), h3.vertices.end(), Vec{0.2, 0.2}) == h3.vertices.end());

    const std::vector<Vec> one{Vec{0.3, 0.3, 0.3}};
    CHECK(convex_hull(one).affine_dim == 0);
    CHECK_THROWS_AS(convex_hull(std::vector<Vec>{}), InputError);
}

TEST_CASE("convex hull is idempotent and contains its inputs") {
    Rng rng(21);
    for (int dim : {1, 2, 3}) {
        std::vector<Vec> pts;
        Vec c(dim);
        for (int i = 0; i < 60; ++i) pts.push_back(rng.in_ball(c, 1.0));
        const auto h = convex_hull(pts);
        CHECK(h.affine_dim == dim);
        for (const auto& p : pts) CHECK(h.contains(p));
        const auto again = convex_hull(h.vertices);
        CHECK(again.vertices.size() == h.vertices.size());
        for (const auto& v : again.vertices)
            CHECK(std::find(h.vertices.begin(), h.vertices.end(), v) != h.vertices.end());
    }
}

TEST_CASE("normal cone directions") {
    const auto half = convex_hull(arc_left(64));
    const auto nu = normal_cone_directions(half, Vec{0.0, 0.0}, 8);
    REQUIRE(nu.size() == 1);
    CHECK(nu[0][0] == doctest::Approx(1.0));
    CHECK(std::abs(nu[0][1]) <= 1e-12);

    const std::vector<Vec> seg{Vec{0.0, -1.0}, Vec{0.0, 1.0}};
    const auto line = normal_cone_directions(convex_hull(seg), Vec{0.0, 0.0}, 8);
    REQUIRE(line.size() == 2);
    CHECK(std::abs(std::abs(line[0][0]) - 1.0) <= 1e-12);
    CHECK(line[0][0] == doctest::Approx(-line[1][0]));

    const std::vector<Vec> tri{Vec{0.0, 0.0}, Vec{1.0, 0.0}, Vec{0.0, 1.0}};
    const auto h = convex_hull(tri);
    CHECK(normal_cone_directions(h, Vec{0.2, 0.2}, 8).empty());
    CHECK_THROWS_AS(normal_cone_directions(h, Vec{2.0, 2.0}, 8), InputError);

    // Every generator supports the polytope at p0.
    for (const Vec& p0 : {Vec{0.0, 0.0}, Vec{0.5, 0.5}, Vec{0.0, 0.3}}) {
        for (const auto& n : normal_cone_directions(h, p0, 8)) {
            CHECK(norm(n) == doctest::Approx(1.0));
            for (const auto& q : h.vertices) CHECK(dot(n, q - p0) <= 1e-9);
        }
    }
}

TEST_CASE("clustering keeps representatives apart") {
    std::vector<Vec> s;
    for (int i = 0; i <= 400; ++i) s.push_back(Vec{0.0, -1.0 + i / 200.0});
    s.push_back(Vec{3.0, 3.0});
    const auto [means, sizes] = cluster_samples(s, 0.02);
    int total = 0;
    for (int z : sizes) total += z;
    CHECK(total == static_cast<int>(s.size()));
    for (std::size_t i = 0; i < means.size(); ++i)
        for (std::size_t j = i + 1; j < means.size(); ++j) CHECK(distance(means[i], means[j]) > 0.02);
    // A continuum stays a continuum: the segment is covered at spacing about eps_c.
    for (double t = -1.0; t <= 1.0; t += 0.01) CHECK(dist_to_set(Vec{0.0, t}, means) <= 0.03);
}

TEST_CASE("reachable gradients of Example 1 at the origin") {
    const auto set = reachable_gradients(FunctionSpec::named("neg-norm", 2), kHalfDisk, Vec{0.0, 0.0},
                                         GradientProbe::for_radius(1.0));
    CHECK(hausdorff_distance(set.representatives, arc_left(720)) <= 0.05);
    for (std::size_t i = 0; i < set.representatives.size(); ++i)
        for (std::size_t j = i + 1; j < set.representatives.size(); ++j)
            CHECK(distance(set.representatives[i], set.representatives[j]) > set.probe.eps_c);
    CHECK(std::is_sorted(set.representatives.begin(), set.representatives.end(), lex_less));
}

TEST_CASE("reachable gradients of Example 2 at the origin") {
    const auto set = reachable_gradients(FunctionSpec::named("neg-abs-x2", 2), kHalfDisk, Vec{0.0, 0.0},
                                         GradientProbe::for_radius(1.0));
    REQUIRE(set.representatives.size() == 2);
    CHECK(distance(set.representatives[0], Vec{0.0, -1.0}) <= 0.02);
    CHECK(distance(set.representatives[1], Vec{0.0, 1.0}) <= 0.02);
}

TEST_CASE("reachable gradients of an affine function") {
    const Vec p{0.7, -0.2};
    const auto set = reachable_gradients(FunctionSpec::affine(p, 1.0), kHalfDisk, Vec{0.3, 0.1},
                                         GradientProbe::for_radius(1.0));
    REQUIRE(set.representatives.size() == 1);
    CHECK(distance(set.representatives[0], p) <= 1e-6);
    CHECK(hull_gap(set, 0.01).empty());
    CHECK_THROWS_AS(reachable_gradients(FunctionSpec::affine(p, 1.0), kHalfDisk, Vec{-2.0, 0.0},
                                        GradientProbe::for_radius(1.0)),
                    Error);
}

TEST_CASE("supergradient defect examples") {
    const ModulusParams p(1.0, 0.0);
    CHECK(supergradient_defect(FunctionSpec::named("neg-norm", 2), kHalfDisk, Vec{0.0, 0.0}, Vec{-1.0, 0.0},
                               Vec{0.5, 0.0}, p) == 0.0);
    CHECK(supergradient_defect(FunctionSpec::named("neg-abs-x2", 2), kHalfDisk, Vec{0.0, 0.0}, Vec{0.0, -1.0},
                               Vec{0.3, 0.4}, p) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(supergradient_defect(FunctionSpec::named("neg-norm", 2), kHalfDisk, Vec{0.2, 0.1}, Vec{5.0, 5.0},
                               Vec{0.2, 0.1}, p) == 0.0);
    CHECK_THROWS_AS(supergradient_defect(FunctionSpec::named("neg-norm", 2), kHalfDisk, Vec{0.2, 0.0},
                                         Vec{1.0, 0.0}, Vec{-0.2, 0.0}, p),
                    HypothesisError);
}

TEST_CASE("approximate reachable gradients satisfy the supergradient inequality") {
    Rng rng(8);
    for (const char* id : {"neg-norm", "neg-abs-x2", "neg-sqrt-x1p4-x2sq"}) {
        const auto f = FunctionSpec::named(id, 2);
        const double C = estimate_constant(f, kHalfDisk, BallRegion(Vec{0.0, 0.0}, 1.0), 1.0, 10000, 1) + 0.05;
        const auto set = reachable_gradients(f, kHalfDisk, Vec{0.0, 0.0}, GradientProbe::for_radius(1.0));
        double worst = -1e300;
        for (int i = 0; i < 1000; ++i) {
            Vec y = rng.in_ball(Vec{0.0, 0.0}, 1.0);
            if (y[0] < 0.0) y[0] = -y[0];
            for (const auto& p : set.representatives)
                worst = std::max(worst, supergradient_defect(f, kHalfDisk, Vec{0.0, 0.0}, p, y, ModulusParams(1.0, C)));
        }
        CHECK(worst <= 5e-3);
    }
}

TEST_CASE("hull gap distinguishes Examples 1-3") {
    const GradientProbe probe = GradientProbe::for_radius(1.0);
    const auto s1 = reachable_gradients(FunctionSpec::named("neg-norm", 2), kHalfDisk, Vec{0.0, 0.0}, probe);
    const auto g1 = hull_gap(s1, 0.01);
    CHECK_FALSE(g1.empty());
    CHECK(dist_to_set(Vec{0.0, 0.0}, g1) <= 0.02);
    const auto hull = s1.hull();
    for (const auto& g : g1) {
        CHECK(hull.on_boundary(g));
        CHECK(dist_to_set(g, s1.representatives) > probe.eps_c);
    }

    const auto s3 = reachable_gradients(FunctionSpec::named("neg-sqrt-x1p4-x2sq", 2), kHalfDisk, Vec{0.0, 0.0}, probe);
    CHECK(hull_gap(s3, 0.01).empty());
    CHECK(hausdorff_distance(s3.representatives, [] {
              std::vector<Vec> s;
              for (int i = 0; i <= 400; ++i) s.push_back(Vec{0.0, -1.0 + i / 200.0});
              return s;
          }()) <= 0.05);

    ReachableGradientSet single;
    single.base = Vec{0.0, 0.0};
    single.representatives = {Vec{0.5, 0.5}};
    CHECK(hull_gap(single, 0.01).empty());
}

TEST_CASE("is_singular examples") {
    const auto probe = GradientProbe::for_radius(1.0);
    const auto f2 = FunctionSpec::named("neg-abs-x2", 2);
    CHECK(is_singular(f2, kHalfDisk, Vec{0.5, 0.0}, 0.05, probe));
    CHECK_FALSE(is_singular(f2, kHalfDisk, Vec{0.5, 0.2}, 0.05, probe));
    CHECK(is_singular(FunctionSpec::named("neg-norm", 2), kHalfDisk, Vec{0.0, 0.0}, 0.05, probe));
}

TEST_CASE("hausdorff distance") {
    const std::vector<Vec> a{Vec{0.0, 0.0}, Vec{1.0, 0.0}};
    const std::vector<Vec> b{Vec{0.0, 0.0}};
    CHECK(hausdorff_distance(a, b) == 1.0);
    CHECK(hausdorff_distance(a, a) == 0.0);
    CHECK(hausdorff_distance(b, a) == hausdorff_distance(a, b));
}

TEST_CASE("probe parameters are validated") {
    GradientProbe p;
    p.ratio = 1.5;
    CHECK_THROWS_AS(p.validate(), InputError);
    GradientProbe q;
    q.r0 = 0.0;
    CHECK_THROWS_AS(q.validate(), InputError);
}
