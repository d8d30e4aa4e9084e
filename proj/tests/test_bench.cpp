#include "tracebo/benchmarks.hpp"

#include <doctest.h>

#include <cmath>

using namespace tracebo;

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST_CASE("test function 1 closed form") {
    auto [f, c] = tf1(vec2(0.0, 0.0));
    CHECK(f == doctest::Approx(1.0));
    CHECK(c[0] == doctest::Approx(0.5));

    // Analytic boundary point on x1 + x2 = pi/3 (here x2 = 0).
    auto [f2, c2] = tf1(vec2(M_PI / 3.0, 0.0));
    (void)f2;
    CHECK(std::abs(c2[0]) <= 1e-15);

    CHECK_THROWS_AS(tf1(vec2(-0.1, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(tf1(vec2(0.0, 6.5)), std::invalid_argument);
}

TEST_CASE("test function 2 closed form") {
    auto [f, c] = tf2(vec2(0.5, 0.5));
    CHECK(f == doctest::Approx(0.25));
    CHECK(c[2] == doctest::Approx(-0.2));

    auto [f2, c2] = tf2(vec2(1.0, 1.0));
    (void)f2;
    CHECK(c2[1] == doctest::Approx(4.0));

    CHECK_THROWS_AS(tf2(vec2(1.2, 0.5)), std::invalid_argument);
}

TEST_CASE("constrained branin closed form") {
    auto [f, c] = branin_c(vec2(-5.0, 15.0));
    CHECK(f == doctest::Approx(225.0));
    (void)c;

    // Near the Branin minimizer (~3 pi, 2.475) the canonical constraint is
    // the Branin surface minus 5, comfortably negative.
    auto [f2, c2] = branin_c(vec2(9.42478, 2.475));
    (void)f2;
    CHECK(c2[0] < 0.0);
    CHECK(c2[0] == doctest::Approx(0.397887 - 5.0).epsilon(1e-3));

    // The literal coefficient flips the cosine term's sign and scale.
    auto [f3, c3] = branin_c(vec2(9.42478, 2.475), true);
    (void)f3;
    CHECK(c3[0] != doctest::Approx(c2[0]));

    CHECK_THROWS_AS(branin_c(vec2(-5.5, 0.0)), std::invalid_argument);
}

TEST_CASE("benchmark evaluations are pure") {
    for (const auto& name : {"tf1", "tf2", "branin", "linear"}) {
        const auto bench = find_benchmark(name);
        REQUIRE(bench.has_value());
        const Vector mid = bench->spec.space.denormalize(vec2(0.37, 0.61));
        const auto [fa, ca] = bench->evaluate(mid);
        const auto [fb, cb] = bench->evaluate(mid);
        CHECK(fa == fb);
        CHECK(ca == cb);
        CHECK(ca.size() == bench->spec.num_constraints);
    }
    CHECK_FALSE(find_benchmark("nope").has_value());
}

TEST_CASE("grid oracle basics") {
    const auto problem = make_tf2();
    SUBCASE("resolution 2 evaluates the corners") {
        const auto r = feasible_grid_oracle(problem, 2);
        CHECK(r.mask.size() == 4);
        // All four corners of [0,1]^2 violate the disc constraint.
        CHECK(r.feasible_count == 0);
        CHECK_FALSE(r.best_value.has_value());
    }
    SUBCASE("resolution below 2 rejected") {
        CHECK_THROWS_AS(feasible_grid_oracle(problem, 1), std::invalid_argument);
    }
    SUBCASE("vacuous constraints make everything feasible") {
        BenchmarkProblem stub;
        stub.spec = ProblemSpec{SearchSpace(vec2(0, 0), vec2(1, 1)), 1, Sense::minimize, "stub"};
        stub.evaluate = [](const Vector& x) {
            Vector c(1);
            c << -1.0;
            return std::make_pair(x.squaredNorm(), c);
        };
        const auto r = feasible_grid_oracle(stub, 5);
        CHECK(r.feasible_count == 25);
        REQUIRE(r.best_value.has_value());
        CHECK(*r.best_value == doctest::Approx(0.0));
    }
}

TEST_CASE("tf1 grid oracle self-check") {
    const auto r = feasible_grid_oracle(make_tf1(), 200);
    CHECK(r.feasible_count > 0);
    CHECK(r.feasible_count < static_cast<int>(r.mask.size()));
}

TEST_CASE("grid oracle optimum improves with resolution") {
    const auto problem = make_tf1();
    const auto coarse = feasible_grid_oracle(problem, 60);
    const auto fine = feasible_grid_oracle(problem, 240);
    REQUIRE(coarse.best_value.has_value());
    REQUIRE(fine.best_value.has_value());
    CHECK(*fine.best_value <= *coarse.best_value);  // minimization
}

TEST_CASE("theorem 1 on the synthetic linear boundary problem") {
    const auto problem = make_linear_boundary();

    SUBCASE("11-point grid containing x1 = 0.5") {
        std::vector<Vector> grid;
        for (int i = 0; i <= 10; ++i) grid.push_back(vec2(i / 10.0, 0.5));
        CHECK(theorem1_check(problem, grid));
    }
    SUBCASE("grid without the boundary point is refused") {
        std::vector<Vector> grid;
        for (int i = 0; i <= 10; ++i) {
            if (i == 5) continue;
            grid.push_back(vec2(i / 10.0, 0.5));
        }
        CHECK_THROWS_AS(theorem1_check(problem, grid), std::invalid_argument);
    }
}

TEST_CASE("theorem 1 on tf1 with a boundary-augmented grid") {
    const auto problem = make_tf1();
    auto grid = regular_grid(problem.spec.space, 101);
    const auto boundary = boundary_points(problem, 50);
    CHECK(!boundary.empty());
    for (const auto& b : boundary) grid.push_back(b);
    CHECK(theorem1_check(problem, grid));
}

TEST_CASE("boundary points sit on the feasible side within an ulp") {
    for (const auto& name : {"tf1", "tf2", "branin"}) {
        const auto bench = find_benchmark(name);
        REQUIRE(bench.has_value());
        const auto pts = boundary_points(*bench, 20);
        CHECK(!pts.empty());
        for (const auto& x : pts) {
            const auto [f, c] = bench->evaluate(x);
            (void)f;
            CHECK((c.array() <= 0.0).all());
            CHECK(c.cwiseAbs().minCoeff() <= 1e-9);
        }
    }
}
