#include "doctest.h"

#include <cmath>

#include "rfde/solver.hpp"
#include "rfde/stochastic.hpp"
#include "test_helpers.hpp"

using namespace rfde;

TEST_CASE("zero coefficient returns the initial condition immediately") {
    std::mt19937_64 rng = seeded_engine(211);
    Grid g = testing::random_grid(rng, 40);
    RoughPath rp = RoughPath::zero_cells(testing::random_path(rng, g, 2, 0.3));
    ControlledPath y = testing::random_controlled(rng, rp.path_ptr(), 1, 1);
    auto cf = lift_vector_field(make_constant_field(1, 1, 2, 0.0));
    const SolutionReport report = solve_rfde(rp, y, *cf);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK((report.solution.value(i) - y.value(i)).norm() <= 1e-13 * (1.0 + y.value(i).norm()));
    for (const auto& piece : report.pieces) CHECK(piece.iterations <= 1);
}

TEST_CASE("constant coefficient integrates the driver exactly") {
    std::mt19937_64 rng = seeded_engine(223);
    Grid g = testing::random_grid(rng, 60);
    RoughPath rp = RoughPath::zero_cells(testing::random_path(rng, g, 2, 0.3));
    const Vec y0 = Vec::Constant(1, 0.75);
    ControlledPath y = ControlledPath::constant(rp.path_ptr(), y0);
    const double c = 1.5;
    auto cf = lift_vector_field(make_constant_field(1, 1, 2, c));
    const SolutionReport report = solve_rfde(rp, y, *cf);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec want = y0 + Vec::Constant(1, c) * 0 + c * Mat::Ones(1, 2) * rp.path().increment(0, i);
        CHECK((report.solution.value(i) - want).norm() <= 1e-12 * (1.0 + want.norm()));
    }
    CHECK(report.residual <= 1e-12);
}

TEST_CASE("sine field against the smooth driver matches the closed-form flow") {
    const std::size_t cells = 2048;
    Grid g = Grid::uniform(0.0, 1.0, cells);
    RoughPath rp = RoughPath::exact_linear(g, Vec::Ones(1));
    ControlledPath y = ControlledPath::constant(rp.path_ptr(), Vec::Ones(1));
    auto cf = lift_vector_field(make_sin_field(1, 1, 1, 1.0, 1.0));
    const SolutionReport report = solve_rfde(rp, y, *cf);
    const double got = report.solution.value(cells)[0];
    const double want = testing::sine_flow(1.0, 1.0);
    CHECK(std::abs(got - want) <= 1e-5);
    CHECK(report.residual <= 1e-10 * (1.0 + std::abs(want)));
}

TEST_CASE("solver agrees with the forward recursion") {
    std::mt19937_64 rng = seeded_engine(227);

    SUBCASE("pointwise field over a Brownian zero-cell lift") {
        Grid g = Grid::uniform(0.0, 1.0, 128);
        RoughPath rp = RoughPath::zero_cells(testing::random_path(rng, g, 2, 1.0 / 12.0));
        ControlledPath y = ControlledPath::constant(rp.path_ptr(), Vec::Constant(1, 0.4));
        auto cf = lift_vector_field(make_tanh_field(1, 1, 2, 1.0, 1.0));
        const SolutionReport report = solve_rfde(rp, y, *cf);
        const ControlledPath direct = forward_recursion(rp, y, *cf);
        double scale = 1.0;
        for (std::size_t i = 0; i < g.size(); ++i) scale = std::max(scale, direct.value(i).norm());
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK((report.solution.value(i) - direct.value(i)).norm() <= 1e-9 * scale);
    }

    SUBCASE("delayed field over a stacked engineered-jump lift") {
        DriverSpec spec;
        spec.kind = DriverKind::engineered_jumps;
        spec.dimension = 1;
        spec.step = 1.0 / 64.0;
        spec.delays = {0.25};
        spec.jumps = {{0.3, 0, 0.8}, {0.55, 0, -0.5}, {0.8, 0, 0.3}};
        const SampledPath z = simulate_driver(spec);
        const StackedDriver stacked = delayed_lift(z, spec.delays);
        const RoughPath& rp = stacked.rough_path();
        ControlledPath y = ControlledPath::constant(rp.path_ptr(), Vec::Constant(1, 1.0));
        auto cf = lift_constant_delay(extend_by_zero(make_tanh_field(2, 1, 1, 1.0, 1.0), 0, 2),
                                      stacked.shape(),
                                      {DelaySegment::constant(rp.grid().size(), Vec::Ones(1))});
        const SolutionReport report = solve_rfde(rp, y, *cf);
        const ControlledPath direct = forward_recursion(rp, y, *cf);
        for (std::size_t i = 0; i < rp.grid().size(); ++i)
            CHECK((report.solution.value(i) - direct.value(i)).norm() <= 1e-9 * 2.0);
    }
}

TEST_CASE("solution satisfies the discrete recursion and the derivative identity") {
    std::mt19937_64 rng = seeded_engine(229);
    Grid g = Grid::uniform(0.0, 1.0, 96);
    RoughPath rp = RoughPath::zero_cells(testing::random_path(rng, g, 1, 0.08));
    ControlledPath y = ControlledPath::constant(rp.path_ptr(), Vec::Constant(1, 0.2));
    auto cf = lift_vector_field(make_sin_field(1, 1, 1, 1.0, 1.0));
    const SolutionReport report = solve_rfde(rp, y, *cf);
    CHECK(report.residual <= 1e-10 * (1.0 + report.apriori_norm));

    const ControlledPath f = cf->evaluate(report.solution);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Mat want = y.gubinelli(i) + f.value_shaped(i);
        CHECK((report.solution.gubinelli(i) - want).norm() == 0.0);
    }

    SUBCASE("recorded contraction ratios stay below one") {
        for (const auto& piece : report.pieces)
            for (double r : piece.contraction_ratios) CHECK(r < 1.0);
    }
}

TEST_CASE("apriori norms") {
    std::mt19937_64 rng = seeded_engine(233);
    Grid g = Grid::uniform(0.0, 1.0, 64);

    SUBCASE("zero coefficient: solution norm equals the initial norm") {
        RoughPath rp = RoughPath::zero_cells(testing::random_path(rng, g, 1, 0.1));
        ControlledPath y = testing::random_controlled(rng, rp.path_ptr(), 1, 1);
        auto cf = lift_vector_field(make_constant_field(1, 1, 1, 0.0));
        const SolutionReport report = solve_rfde(rp, y, *cf);
        const auto norms = apriori_norms(report, y, *cf, rp, 2.5);
        CHECK(norms.solution_norm == doctest::Approx(norms.initial_norm).epsilon(1e-9));
    }

    SUBCASE("zero driver and vanishing derivative give a zero-norm solution") {
        RoughPath rp = RoughPath::zero_cells(SampledPath::constant(g, Vec::Zero(1)));
        ControlledPath y = ControlledPath::constant(rp.path_ptr(), Vec::Zero(1));
        auto cf = lift_vector_field(make_tanh_field(1, 1, 1, 1.0, 1.0));  // tanh(0) = 0
        const SolutionReport report = solve_rfde(rp, y, *cf);
        const auto norms = apriori_norms(report, y, *cf, rp, 2.5);
        CHECK(norms.solution_norm == 0.0);
        CHECK(norms.driver_norm == 0.0);
    }

    SUBCASE("scaling the driver never shrinks the solution norm") {
        SampledPath w = testing::random_path(rng, g, 1, 0.1);
        auto cf = lift_vector_field(make_sin_field(1, 1, 1, 1.0, 1.0));
        double prev = -1.0;
        for (double amp : {0.5, 1.0, 2.0}) {
            std::vector<Vec> scaled;
            for (std::size_t i = 0; i < w.size(); ++i) scaled.push_back(Vec(w.value(i) * amp));
            RoughPath rp = RoughPath::zero_cells(SampledPath(g, std::move(scaled)));
            ControlledPath y = ControlledPath::constant(rp.path_ptr(), Vec::Constant(1, 0.3));
            const SolutionReport report = solve_rfde(rp, y, *cf);
            CHECK(report.apriori_norm >= prev - 1e-9);
            prev = report.apriori_norm;
        }
    }
}

TEST_CASE("stability experiment") {
    std::mt19937_64 rng = seeded_engine(239);
    Grid g = Grid::uniform(0.0, 1.0, 64);
    RoughPath rp = RoughPath::zero_cells(testing::random_path(rng, g, 1, 0.1));

    SUBCASE("identical inputs have zero distances and zero ratio") {
        ControlledPath y = ControlledPath::constant(rp.path_ptr(), Vec::Constant(1, 0.5));
        auto cf = lift_vector_field(make_tanh_field(1, 1, 1, 1.0, 1.0));
        StabilityInput in{&rp, &y, cf.get()};
        const auto res = stability_experiment(in, in, 0.0, 2.5, 100.0);
        CHECK(res.input_distance == 0.0);
        CHECK(res.output_distance == 0.0);
        CHECK(res.ratio == 0.0);
    }

    SUBCASE("shifting y0 in the constant-field case responds exactly linearly") {
        const double h = 1e-3;
        ControlledPath ya = ControlledPath::constant(rp.path_ptr(), Vec::Constant(1, 0.5));
        ControlledPath yb = ControlledPath::constant(rp.path_ptr(), Vec::Constant(1, 0.5 + h));
        auto cf = lift_vector_field(make_constant_field(1, 1, 1, 2.0));
        StabilityInput a{&rp, &ya, cf.get()};
        StabilityInput b{&rp, &yb, cf.get()};
        const auto res = stability_experiment(a, b, 0.0, 2.5, 100.0);
        CHECK(res.input_distance == doctest::Approx(h).epsilon(1e-12));
        CHECK(res.output_distance == doctest::Approx(h).epsilon(1e-12));
        CHECK(res.ratio == doctest::Approx(1.0).epsilon(1e-9));
    }
}
