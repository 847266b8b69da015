#include "doctest.h"

#include <cmath>

#include "rfde/stochastic.hpp"
#include "rfde/variation.hpp"
#include "test_helpers.hpp"

using namespace rfde;

TEST_CASE("driver simulation degenerate cases") {
    SUBCASE("compensated poisson with zero rate is identically zero") {
        DriverSpec spec;
        spec.kind = DriverKind::compensated_poisson;
        spec.jump_rate = 0.0;
        spec.step = 1.0 / 32.0;
        const SampledPath z = simulate_driver(spec);
        for (std::size_t i = 0; i < z.size(); ++i) CHECK(z.value(i).norm() == 0.0);
    }
    SUBCASE("brownian with zero covariance is identically zero") {
        DriverSpec spec;
        spec.covariance = Mat::Zero(1, 1);
        spec.step = 1.0 / 32.0;
        const SampledPath z = simulate_driver(spec);
        for (std::size_t i = 0; i < z.size(); ++i) CHECK(z.value(i).norm() == 0.0);
    }
    SUBCASE("bad specs are rejected") {
        DriverSpec spec;
        spec.delays = {0.3};
        spec.step = 0.25;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
        DriverSpec neg;
        neg.kind = DriverKind::compensated_poisson;
        neg.jump_rate = -1.0;
        CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
    }
    SUBCASE("history region is flat zero") {
        DriverSpec spec;
        spec.delays = {0.25};
        spec.step = 1.0 / 32.0;
        spec.seed = 4;
        const SampledPath z = simulate_driver(spec);
        CHECK(z.grid().front() == doctest::Approx(-0.25));
        for (std::size_t i = 0; i < z.size() && z.grid().time(i) <= 0.0; ++i)
            CHECK(z.value(i).norm() == 0.0);
    }
}

TEST_CASE("brownian law sanity: variance of Z_T over seeds") {
    DriverSpec spec;
    spec.step = 1.0 / 64.0;
    spec.covariance = Mat::Constant(1, 1, 1.7);
    double sum_sq = 0.0;
    const int seeds = 4000;
    for (int s = 0; s < seeds; ++s) {
        spec.seed = static_cast<std::uint64_t>(s);
        const SampledPath z = simulate_driver(spec);
        const double zt = z.value(z.size() - 1)[0];
        sum_sq += zt * zt;
    }
    CHECK(sum_sq / seeds == doctest::Approx(1.7).epsilon(0.05));
}

TEST_CASE("martingale increments average to zero over seeds") {
    DriverSpec spec;
    spec.kind = DriverKind::compensated_poisson;
    spec.jump_rate = 3.0;
    spec.jump_size = 0.5;
    spec.step = 1.0 / 16.0;
    const int seeds = 600;
    double mean = 0.0, mean_sq = 0.0;
    for (int s = 0; s < seeds; ++s) {
        spec.seed = static_cast<std::uint64_t>(s) + 1000;
        const SampledPath z = simulate_driver(spec);
        const double incr = z.value(z.size() - 1)[0];  // Z_T - Z_0
        mean += incr;
        mean_sq += incr * incr;
    }
    mean /= seeds;
    mean_sq /= seeds;
    const double stderr_mean = std::sqrt((mean_sq - mean * mean) / seeds);
    CHECK(std::abs(mean) <= 3.0 * stderr_mean + 1e-12);
}

TEST_CASE("bracket of engineered coincident jumps") {
    DriverSpec spec;
    spec.kind = DriverKind::engineered_jumps;
    spec.step = 0.1;
    spec.delays = {0.5};
    spec.jumps = {{0.3, 0, 1.0}, {0.8, 0, 1.0}};
    const SampledPath z = simulate_driver(spec);
    const StackedDriver stacked = delayed_lift(z, spec.delays);
    const SampledPath x0 = stacked.component(0, 0);
    const SampledPath x1 = stacked.component(0, 1);
    const SampledPath b = bracket(x0, x1);
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double want = b.grid().time(i) >= 0.8 - 1e-12 ? 1.0 : 0.0;
        CHECK(b.value(i)[0] == doctest::Approx(want));
    }
}

TEST_CASE("bracket of a path with itself approximates the quadratic variation") {
    DriverSpec spec;
    spec.step = 1.0 / 4096.0;
    double mean = 0.0;
    const int seeds = 60;
    for (int s = 0; s < seeds; ++s) {
        spec.seed = static_cast<std::uint64_t>(s);
        const SampledPath z = simulate_driver(spec);
        const SampledPath b = bracket(z, z);
        mean += b.value(b.size() - 1)[0];
    }
    CHECK(mean / seeds == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("bracket partial sums converge along refining partitions, seed-averaged") {
    DriverSpec spec;
    spec.step = 1.0 / 1024.0;
    const int seeds = 100;
    double prev_mean = std::numeric_limits<double>::infinity();
    for (std::size_t stride : {64, 16, 4}) {
        double mean = 0.0;
        for (int s = 0; s < seeds; ++s) {
            spec.seed = static_cast<std::uint64_t>(s) + 500;
            const SampledPath z = simulate_driver(spec);
            const SampledPath full = bracket(z, z);
            const SampledPath approx = bracket_partial_sum(z, z, stride);
            mean += std::abs(approx.value(approx.size() - 1)[0] - full.value(full.size() - 1)[0]);
        }
        mean /= seeds;
        CHECK(mean < prev_mean);
        prev_mean = mean;
    }
    // stride 1 is the bracket itself, exactly
    spec.seed = 77;
    const SampledPath z = simulate_driver(spec);
    const SampledPath full = bracket(z, z);
    const SampledPath unit = bracket_partial_sum(z, z, 1);
    CHECK((unit.value(unit.size() - 1) - full.value(full.size() - 1)).norm() == 0.0);
}

TEST_CASE("delayed lift structure") {
    DriverSpec spec;
    spec.step = 1.0 / 64.0;
    spec.delays = {0.25, 0.5};
    spec.seed = 11;
    const SampledPath z = simulate_driver(spec);
    const StackedDriver stacked = delayed_lift(z, spec.delays);
    const RoughPath& rp = stacked.rough_path();
    REQUIRE(rp.dim() == 3);

    SUBCASE("block 0 is Z on [0, T], later blocks are exact shifts") {
        const Grid& g = rp.grid();
        const std::size_t start = z.grid().index_of(0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(rp.path().value(i)[0] == z.value(start + i)[0]);
            const std::size_t s16 = i >= 16 ? i - 16 : 0;
            const std::size_t s32 = i >= 32 ? i - 32 : 0;
            const double want1 = i >= 16 ? z.value(start + s16)[0] : 0.0;
            const double want2 = i >= 32 ? z.value(start + s32)[0] : 0.0;
            CHECK(rp.path().value(i)[1] == want1);
            CHECK(rp.path().value(i)[2] == want2);
        }
    }

    SUBCASE("block map") {
        CHECK(stacked.block_of(0) == std::pair<int, int>{0, 0});
        CHECK(stacked.block_of(2) == std::pair<int, int>{0, 2});
    }
}

TEST_CASE("delayed lift reproduces Ito identities") {
    SUBCASE("scalar summation by parts") {
        DriverSpec spec;
        spec.step = 1.0 / 512.0;
        spec.seed = 21;
        const SampledPath z = simulate_driver(spec);
        const StackedDriver stacked = delayed_lift(z, {});
        const RoughPath& rp = stacked.rough_path();
        const std::size_t last = rp.path().size() - 1;
        double qv = 0.0;
        for (std::size_t k = 0; k < last; ++k) {
            const double d = rp.path().increment(k, k + 1)[0];
            qv += d * d;
        }
        const double w1 = rp.path().value(last)[0];
        CHECK(rp.chen(0, last)(0, 0) == doctest::Approx((w1 * w1 - qv) / 2.0).epsilon(1e-12));
    }

    SUBCASE("antisymmetry with the bracket, exact on grid pairs") {
        DriverSpec spec;
        spec.kind = DriverKind::engineered_jumps;
        spec.step = 0.1;
        spec.delays = {0.5};
        spec.jumps = {{0.3, 0, 1.0}, {0.8, 0, 1.0}};
        const SampledPath z = simulate_driver(spec);
        const StackedDriver stacked = delayed_lift(z, spec.delays);
        const RoughPath& rp = stacked.rough_path();
        const SampledPath b01 = bracket(stacked.component(0, 0), stacked.component(0, 1));
        const std::size_t n = rp.path().size();
        for (std::size_t s = 0; s < n; s += 2)
            for (std::size_t t = s; t < n; t += 3) {
                const Mat xx = rp.chen(s, t);
                const Vec incr = rp.path().increment(s, t);
                const double lhs01 = xx(0, 1) + xx(1, 0);
                const double rhs01 = incr[0] * incr[1] - (b01.value(t)[0] - b01.value(s)[0]);
                CHECK(lhs01 == doctest::Approx(rhs01).epsilon(1e-12));
            }
        // the example's headline value: the only matching jump pair gives 1
        CHECK(b01.value(n - 1)[0] == doctest::Approx(1.0));
    }

    SUBCASE("coarse-cell left-point construction agrees with Chen reconstruction") {
        DriverSpec spec;
        spec.step = 1.0 / 128.0;
        spec.delays = {0.25};
        spec.seed = 31;
        const SampledPath z = simulate_driver(spec);
        const StackedDriver stacked = delayed_lift(z, spec.delays);
        const RoughPath& rp = stacked.rough_path();
        const std::size_t stride = 8;
        const std::size_t n = rp.path().size();
        for (std::size_t c = 0; c + stride < n; c += stride) {
            Mat direct = Mat::Zero(2, 2);
            for (std::size_t k = c; k < c + stride; ++k)
                direct += rp.path().increment(c, k) * rp.path().increment(k, k + 1).transpose();
            CHECK((rp.chen(c, c + stride) - direct).norm() <= 1e-13 * (1.0 + direct.norm()));
        }
    }
}

TEST_CASE("left-point scheme") {
    SUBCASE("zero field stays at y0") {
        DriverSpec spec;
        spec.step = 1.0 / 64.0;
        spec.delays = {0.25};
        spec.seed = 3;
        const SampledPath z = simulate_driver(spec);
        const VectorField f = make_constant_field(2, 1, 1, 0.0);
        const SampledPath y = euler_maruyama_delay(z, f, Vec::Ones(1), [](double) { return Vec::Ones(1); },
                                                   spec.delays);
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(y.value(i)[0] == 1.0);
    }

    SUBCASE("reading the delayed value over the first lag window gives 1 + W") {
        DriverSpec spec;
        spec.step = 1.0 / 64.0;
        spec.delays = {0.25};
        spec.seed = 5;
        const SampledPath z = simulate_driver(spec);
        Mat coeff = Mat::Zero(1, 2);
        coeff(0, 1) = 1.0;  // f(y, z) = z
        const VectorField f = make_linear_field(2, 1, 1, coeff);
        const SampledPath y = euler_maruyama_delay(z, f, Vec::Ones(1), [](double) { return Vec::Ones(1); },
                                                   spec.delays);
        const std::size_t start = z.grid().index_of(0.0);
        for (std::size_t i = 0; i < y.size() && y.grid().time(i) <= 0.25 + 1e-12; ++i)
            CHECK(y.value(i)[0] == doctest::Approx(1.0 + z.value(start + i)[0]).epsilon(1e-13));
    }

    SUBCASE("matches an independently coded left-point sum on the second window") {
        DriverSpec spec;
        spec.step = 1.0 / 128.0;
        spec.delays = {0.25};
        spec.seed = 6;
        const SampledPath z = simulate_driver(spec);
        Mat coeff = Mat::Zero(1, 2);
        coeff(0, 1) = 1.0;
        const VectorField f = make_linear_field(2, 1, 1, coeff);
        const SampledPath y = euler_maruyama_delay(z, f, Vec::Ones(1), [](double) { return Vec::Ones(1); },
                                                   spec.delays);
        // direct evaluation: Y_t = Y_r + sum (1 + W_{t_k - r}) dW_k over [r, t]
        const std::size_t start = z.grid().index_of(0.0);
        const std::size_t ridx = y.grid().index_of(0.25);
        double acc = y.value(ridx)[0];
        for (std::size_t k = ridx; k + 1 < y.size() && y.grid().time(k) < 0.5 - 1e-12; ++k) {
            const double w_delayed = z.value(start + k - 32)[0];
            acc += (1.0 + w_delayed) * (z.value(start + k + 1)[0] - z.value(start + k)[0]);
            CHECK(y.value(k + 1)[0] == doctest::Approx(acc).epsilon(1e-13));
        }
    }
}

TEST_CASE("rough solve coincides with the left-point scheme at matched resolution") {
    SUBCASE("zero field: gap is exactly zero") {
        DriverSpec spec;
        spec.step = 1.0 / 64.0;
        spec.delays = {0.25};
        spec.seed = 8;
        const VectorField f = make_constant_field(2, 1, 1, 0.0);
        const auto result = rde_vs_sde_compare(spec, f, Vec::Ones(1), [](double) { return Vec::Ones(1); },
                                               2.5, 1);
        CHECK(result.levels[0].sup_gap == 0.0);
    }

    SUBCASE("bounded field over brownian and compensated poisson drivers") {
        for (auto kind : {DriverKind::brownian, DriverKind::compensated_poisson}) {
            DriverSpec spec;
            spec.kind = kind;
            spec.jump_rate = 2.0;
            spec.jump_size = 0.4;
            spec.step = 1.0 / 128.0;
            spec.delays = {0.25};
            spec.seed = 9;
            const VectorField f = make_tanh_field(2, 1, 1, 1.0, 1.0);
            const auto result = rde_vs_sde_compare(spec, f, Vec::Ones(1),
                                                   [](double) { return Vec::Ones(1); }, 2.5, 2);
            for (const auto& lvl : result.levels) CHECK(lvl.sup_gap <= 1e-10 * lvl.scale);
        }
    }
}

TEST_CASE("variable-delay stack rounds the delayed block down to the grid") {
    DriverSpec spec;
    spec.step = 1.0 / 32.0;
    spec.delays = {0.5};  // history extent for the extended grid
    spec.seed = 12;
    const SampledPath z = simulate_driver(spec);
    const double h = spec.step;
    auto eta = [h](double t) { return std::max(t / 2.0, 2.0 * h); };
    const RoughPath rp = variable_delay_stack(z, eta);
    const std::size_t start = z.grid().index_of(0.0);
    for (std::size_t i = 4; i < rp.path().size(); ++i) {
        if (rp.grid().time(i) / 2.0 < 2.0 * h) continue;
        CHECK(rp.path().value(i)[1] == z.value(start + i / 2)[0]);
    }
}
