#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"

#include "scx/error.hpp"
#include "scx/extension.hpp"
#include "scx/random.hpp"

using namespace scx;

namespace {

const DomainSpec kHalfDisk = DomainSpec::unit_half_disk();
const BallRegion kUnit(Vec{0.0, 0.0}, 1.0);

// Closed forms from the worked examples (alpha = 1, coefficient 1, B_1(0)).
double closed_form(int k, const Vec& x) {
    if (x[0] < 0.0) return -std::abs(x[1]) + x[0] * x[0];
    if (k == 1) return -std::hypot(x[0], x[1]);
    if (k == 2) return -std::abs(x[1]);
    return -std::sqrt(std::pow(x[0], 4) + x[1] * x[1]);
}

const char* example_id(int k) {
    static const char* ids[] = {"neg-norm", "neg-abs-x2", "neg-sqrt-x1p4-x2sq"};
    return ids[k - 1];
}

// Example fields are expensive to build; share them across test cases.
std::shared_ptr<ExtensionField> example_field(int k, double spacing) {
    static std::map<std::pair<int, double>, std::shared_ptr<ExtensionField>> cache;
    auto& f = cache[{k, spacing}];
    if (!f)
        f = build_extension(FunctionSpec::named(example_id(k), 2), kHalfDisk, kUnit, 1.0, 0.0,
                            SupportOptions::for_ball(kUnit, spacing));
    return f;
}

}  // namespace

TEST_CASE("support set of Example 1") {
    const auto E = example_field(1, 0.05);
    const auto& K = E->support();
    CHECK_FALSE(K.pairs.empty());
    const double lip = lipschitz_estimate(FunctionSpec::named("neg-norm", 2), kHalfDisk, kUnit, 2000, 1);
    std::vector<Vec> at_origin;
    bool found_node = false, found_flat = false;
    for (const auto& pr : K.pairs) {
        CHECK(kHalfDisk.contains(pr.y, Where::Closure));
        CHECK(kUnit.contains_closed(pr.y));
        CHECK(norm(pr.p) <= lip + 0.02 + 1e-9);
        if (distance(pr.y, Vec{0.5, 0.5}) < 1e-12) {
            found_node = true;
            CHECK(distance(pr.p, Vec{-1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)}) <= 1e-6);
        }
        if (distance(pr.y, Vec{0.0, 0.5}) < 1e-12) {
            found_flat = true;
            CHECK(distance(pr.p, Vec{0.0, -1.0}) <= 0.02);
        }
        if (norm(pr.y) == 0.0) at_origin.push_back(pr.p);
    }
    CHECK(found_node);
    CHECK(found_flat);
    REQUIRE(at_origin.size() > 3);
    // Screened representatives sit on the arc; they need not cover all of it.
    for (const auto& p : at_origin) {
        CHECK(std::abs(norm(p) - 1.0) <= 0.05);
        CHECK(p[0] <= 0.05);
    }
    CHECK_THROWS_AS(build_support_set(FunctionSpec::named("neg-norm", 2), kHalfDisk, BallRegion(Vec{-3.0, 0.0}, 1.0),
                                      SupportOptions::for_ball(kUnit, 0.05)),
                    GeometryError);
}

TEST_CASE("extend examples") {
    const auto E1 = example_field(1, 0.01);
    CHECK(std::abs(E1->value(Vec{-0.5, 0.3}) - (-0.05)) <= 0.02);
    CHECK(std::abs(E1->value(Vec{0.5, 0.5}) + 0.70711) <= 1e-5);
    CHECK(E1->value(Vec{0.5, 0.5}) == -std::hypot(0.5, 0.5));
    const auto E3 = example_field(3, 0.01);
    CHECK(std::abs(E3->value(Vec{-0.2, -0.4}) - (-0.36)) <= 0.02);
    CHECK_THROWS_AS(E1->value(Vec{1.5, 0.0}), InputError);
}

TEST_CASE("envelope identity, upper bound, closed form and exhaustive agreement") {
    Rng rng(4);
    for (int k = 1; k <= 3; ++k) {
        const auto E = example_field(k, 0.01);
        const auto& K = E->support();
        double identity = 0.0;
        for (const auto& pr : K.pairs) identity = std::max(identity, std::abs(E->value(pr.y) - pr.u));
        CHECK(identity <= 1e-12);
        for (int i = 0; i < 300; ++i) {
            const Vec x = rng.in_ball(kUnit.center, 1.0);
            const double v = E->value(x);
            CHECK(v == E->exhaustive_value(x));
            CHECK(std::abs(v - closed_form(k, x)) <= 0.02);
            const auto& pr = K.pairs[static_cast<std::size_t>(rng.uniform() * K.pairs.size())];
            const double d = distance(x, pr.y);
            CHECK(v <= pr.u + dot(pr.p, x - pr.y) + E->coefficient() * d * d);
        }
        // Batch and pointwise evaluation agree bitwise.
        std::vector<Vec> xs;
        for (int i = 0; i < 50; ++i) xs.push_back(rng.in_ball(Vec{0.1, -0.2}, 0.05));
        std::vector<double> out(xs.size());
        E->values(xs, out);
        for (std::size_t i = 0; i < xs.size(); ++i) CHECK(out[i] == E->value(xs[i]));
    }
}

TEST_CASE("refining the support set never raises the envelope") {
    const auto u = FunctionSpec::named("neg-abs-x2", 2);
    const auto full = build_support_set(u, kHalfDisk, kUnit, SupportOptions::for_ball(kUnit, 0.05));
    SupportSet sub = full;
    sub.pairs.clear();
    for (std::size_t i = 0; i < full.pairs.size(); i += 3) sub.pairs.push_back(full.pairs[i]);
    const ExtensionField Ef(u, kHalfDisk, full, ModulusParams(1.0, 0.0), 1.0);
    const ExtensionField Es(u, kHalfDisk, sub, ModulusParams(1.0, 0.0), 1.0);
    Rng rng(12);
    for (int i = 0; i < 500; ++i) {
        const Vec x = rng.in_ball(kUnit.center, 1.0);
        CHECK(Ef.value(x) <= Es.value(x));
    }
}

TEST_CASE("affine data is reproduced exactly on the closure") {
    const auto u = FunctionSpec::affine(Vec{0.4, -1.3}, 0.2);
    const auto E = build_extension(u, kHalfDisk, kUnit, 1.0, 0.0, SupportOptions::for_ball(kUnit, 0.05));
    Rng rng(2);
    for (int i = 0; i < 500; ++i) {
        Vec x = rng.in_ball(kUnit.center, 1.0);
        x[0] = std::abs(x[0]);
        CHECK(E->value(x) == u(x));
    }
}

TEST_CASE("descriptor round trip re-evaluates bit-identically") {
    const auto E = build_extension(FunctionSpec::named("neg-norm", 2), kHalfDisk, kUnit, 1.0, 0.0,
                                   SupportOptions::for_ball(kUnit, 0.05));
    const auto back = ExtensionField::from_descriptor(E->descriptor());
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const Vec x = rng.in_ball(kUnit.center, 1.0);
        CHECK(back->value(x) == E->value(x));
    }
    CHECK(back->coefficient() == E->coefficient());
}

TEST_CASE("constant bound examples") {
    CHECK(constant_bound(ModulusParams(1.0, 0.0)) == 6.0);
    CHECK(constant_bound(ModulusParams(0.5, 1.0)) == doctest::Approx(2.0 * 1.5 * (1.0 + std::pow(2.0, 1.5))));
    CHECK(constant_bound(ModulusParams(0.5, 1.0)) == doctest::Approx(11.4853).epsilon(1e-5));
    CHECK(constant_bound(ModulusParams(1.0, -1.0)) == 0.0);
    CHECK(rounded_constant(0.731) == doctest::Approx(0.74));
    CHECK(rounded_constant(-0.2) == 0.0);
}

TEST_CASE("holder ratio") {
    Rng rng(6);
    for (int i = 0; i < 100; ++i) {
        const Vec y = rng.in_ball(kUnit.center, 1.0), x = rng.in_ball(kUnit.center, 1.0),
                  z = rng.in_ball(kUnit.center, 1.0);
        CHECK(holder_ratio(y, x, z, 1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(holder_ratio(y, y, z, 0.5, 3.0) == doctest::Approx(3.0 * 1.5).epsilon(1e-12));
    }
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const Vec y = rng.in_ball(kUnit.center, 1.0), x = rng.in_ball(kUnit.center, 1.0),
                  z = rng.in_ball(kUnit.center, 1.0);
        worst = std::max(worst, holder_ratio(y, x, z, 0.5, 1.0));
    }
    CHECK(worst <= 1.5 * (1.0 + std::pow(2.0, 1.5)) + 1e-9);
    CHECK_THROWS_AS(holder_ratio(Vec{0.0, 0.0}, Vec{0.1, 0.1}, Vec{0.1, 0.1}, 1.0, 1.0), InputError);
}

TEST_CASE("partition of unity in one dimension") {
    const DomainSpec omega = DomainSpec::box(Vec{0.0}, Vec{1.0});
    const PartitionOfUnity pu(omega, {BallRegion(Vec{0.0}, 0.3), BallRegion(Vec{1.0}, 0.3)});
    const auto probes = union_probe_grid(pu, 1000);
    CHECK(probes.size() >= 1000);
    for (const auto& y : probes) {
        const auto w = pu.weights(y);
        double s = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            CHECK(w[j] >= 0.0);
            CHECK(w[j] <= 1.0);
            if (!pu.in_element(j, y)) CHECK(w[j] == 0.0);
            s += w[j];
        }
        CHECK(std::abs(s - 1.0) <= 1e-12);
    }
    CHECK_THROWS_AS(pu.weights(Vec{2.0}), PartitionError);
}

TEST_CASE("glued 1D extension equals u on the closed interval") {
    const DomainSpec omega = DomainSpec::box(Vec{0.0}, Vec{1.0});
    const auto u = FunctionSpec::named("x-one-minus-x", 1);
    const std::vector<BallRegion> cover{BallRegion(Vec{0.0}, 0.3), BallRegion(Vec{1.0}, 0.3)};
    std::vector<std::shared_ptr<const ScalarField>> local;
    for (const auto& b : cover)
        local.push_back(build_extension(u, omega, b, 1.0, std::nullopt, SupportOptions::for_ball(b, 0.003)));
    const PartitionOfUnity pu(omega, cover);
    const auto probes = union_probe_grid(pu, 1000);
    const auto g = glue_global(u, pu, local, probes);
    for (int i = 0; i <= 1000; ++i) {
        const Vec y{i / 1000.0};
        CHECK(std::abs(g->value(y) - u(y)) <= 1e-12);
    }
    // Outside the interval the glued field is the local extension.
    CHECK(g->value(Vec{-0.2}) == local[0]->value(Vec{-0.2}));
}

TEST_CASE("single-ball cover reproduces the local field") {
    const auto u = FunctionSpec::named("neg-abs-x2", 2);
    const BallRegion big(Vec{0.0, 0.0}, 1.5);
    const auto E = build_extension(u, kHalfDisk, big, 1.0, 0.0, SupportOptions::for_ball(big, 0.05));
    const PartitionOfUnity pu(kHalfDisk, {big});
    // Omega lies inside the ball, so wherever the ball weight is 1 the glued value is E.
    const auto g = glue_global(u, pu, {E}, union_probe_grid(pu, 500));
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const Vec y = rng.in_ball(Vec{0.0, 0.0}, 1.4);
        const auto w = pu.weights(y);
        if (w.back() == 0.0) CHECK(g->value(y) == doctest::Approx(E->value(y)).epsilon(1e-15));
        else if (kHalfDisk.contains(y, Where::Closure)) CHECK(std::abs(g->value(y) - u(y)) <= 1e-12);
    }
}

TEST_CASE("glued value at an overlap is the weighted mean of local extensions") {
    const auto u = FunctionSpec::named("neg-abs-x2", 2);
    const std::vector<BallRegion> cover{BallRegion(Vec{0.0, 0.4}, 0.6), BallRegion(Vec{0.0, -0.4}, 0.6)};
    std::vector<std::shared_ptr<const ScalarField>> local;
    for (const auto& b : cover) local.push_back(build_extension(u, kHalfDisk, b, 1.0, 0.0, SupportOptions::for_ball(b, 0.02)));
    const PartitionOfUnity pu(kHalfDisk, cover);
    const auto g = glue_global(u, pu, local, union_probe_grid(pu, 500));
    const Vec y{-0.1, 0.05};
    const auto w = pu.weights(y);
    REQUIRE(w[0] > 0.0);
    REQUIRE(w[1] > 0.0);
    const double expected = w[0] * local[0]->value(y) + w[1] * local[1]->value(y) + w[2] * u(y);
    CHECK(g->value(y) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("mollifier quadrature is even and sums to one") {
    for (int dim : {1, 2, 3}) {
        const auto q = MollifierQuadrature::make(dim, dim == 3 ? 9 : 21);
        double s = 0.0;
        for (double w : q.weights) {
            CHECK(w >= 0.0);
            s += w;
        }
        CHECK(s == 1.0);
        const std::size_t n = q.nodes.size();
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(q.nodes[j] == -q.nodes[n - 1 - j]);
            CHECK(q.weights[j] == q.weights[n - 1 - j]);
        }
    }
}

TEST_CASE("mollify examples") {
    const auto aff = FunctionSpec::affine(Vec{0.4, -1.3}, 0.2);
    const auto Ma = MollifiedApproximant(aff.shared(), kUnit, 10);
    const auto Mc = MollifiedApproximant(FunctionSpec::constant(2, 2.5).shared(), kUnit, 10);
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        const Vec x = rng.in_ball(kUnit.center, 0.5);
        CHECK(std::abs(Ma.value(x) - aff(x)) <= 1e-14);
        CHECK(Mc.value(x) == doctest::Approx(2.5).epsilon(1e-15));
    }
    const auto E2 = example_field(2, 0.01);
    const Vec x{-0.25, 0.0};
    for (int h : {10, 20, 40}) {
        const MollifiedApproximant M(E2, kUnit, h);
        CHECK(std::abs(M.value(x) - E2->value(x)) <= 2.0 / h);
    }
    CHECK_THROWS_AS(MollifiedApproximant(E2, kUnit, 2), ParameterError);
    CHECK_THROWS_AS(Ma.value(Vec{0.6, 0.0}), InputError);
}

TEST_CASE("summand differentiability probe") {
    const DomainSpec plane = DomainSpec::ball(Vec{0.0, 0.0}, 2.0);
    const auto e2 = FunctionSpec::from_callable("e2", 2, [](const Vec& x) { return -std::abs(x[1]) + x[0] * x[0]; });
    const auto sq1 = FunctionSpec::from_callable("x1sq", 2, [](const Vec& x) { return x[0] * x[0]; });
    const std::vector<FunctionSpec> smooth{e2, sq1};
    CHECK(summand_differentiability_probe(smooth, plane, Vec{-0.3, 0.2}, 1e-6, 0.02));
    const auto a = FunctionSpec::named("neg-abs-x2", 2);
    const std::vector<FunctionSpec> kinked{a, a};
    CHECK(summand_differentiability_probe(kinked, plane, Vec{0.3, 0.0}, 1e-6, 0.02));

    // Glued Example 2 field: each smooth point of the sum is smooth for the summands.
    const auto E = example_field(2, 0.01);
    const auto Ef = FunctionSpec(std::static_pointer_cast<const ScalarField>(E));
    const auto sq = FunctionSpec::named("sq-norm", 2);
    const std::vector<FunctionSpec> parts{Ef, sq};
    const DomainSpec inner = DomainSpec::ball(Vec{0.0, 0.0}, 0.95);
    Rng rng(10);
    int tested = 0;
    while (tested < 200) {
        const Vec x = rng.in_ball(Vec{0.0, 0.0}, 0.9);
        if (std::abs(x[1]) < 0.01) continue;
        ++tested;
        CHECK(summand_differentiability_probe(parts, inner, x, 1e-6, 0.02));
    }
}
