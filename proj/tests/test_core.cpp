#include "doctest.h"

#include "rfde/rough_path.hpp"
#include "test_helpers.hpp"

using namespace rfde;

TEST_CASE("grid basics") {
    Grid g({0.0, 0.25, 0.5, 1.0});
    CHECK(g.size() == 4);
    CHECK(g.index_of(0.5) == 2);
    CHECK(g.floor_index(0.6) == 2);
    CHECK(g.floor_index(1.0) == 3);
    CHECK_THROWS_AS(Grid({0.0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(g.index_of(0.6), std::invalid_argument);
    CHECK_THROWS_AS(g.floor_index(-0.1), std::out_of_range);

    Grid u = Grid::uniform(0.0, 1.0, 8);
    CHECK(u.size() == 9);
    CHECK(*u.shift_index(4, 0.25) == 2);
    CHECK(!u.shift_index(1, 0.25).has_value());
    CHECK_THROWS_AS(u.shift_index(4, 0.3), std::invalid_argument);
}

TEST_CASE("grid restriction composes") {
    Grid g = Grid::uniform(0.0, 1.0, 10);
    Grid once = g.restricted(2, 8).restricted(1, 4);
    Grid direct = g.restricted(3, 6);
    CHECK(once.same(direct));
}

TEST_CASE("sampled path increments and left limits") {
    Grid g({0.0, 0.5, 1.0});
    SampledPath x = SampledPath::scalar(g, {1.0, 3.0, 2.0});
    CHECK(x.increment(0, 2)[0] == doctest::Approx(1.0));
    CHECK(x.increment(1, 1).norm() == 0.0);
    CHECK(x.left_limit(2)[0] == 3.0);
    CHECK(x.left_limit(0)[0] == 1.0);
    SampledPath sub = x.restricted(1, 2);
    CHECK(sub.size() == 2);
    CHECK(sub.value(0)[0] == 3.0);
}

TEST_CASE("chen reconstruction: empty interval and smooth driver") {
    Grid g = Grid::uniform(0.0, 1.0, 7);
    RoughPath rp = RoughPath::exact_linear(g, Vec::Ones(1));
    CHECK(rp.chen(3, 3).norm() == 0.0);
    for (std::size_t s = 0; s < g.size(); ++s)
        for (std::size_t t = s; t < g.size(); ++t) {
            const double dt = g.time(t) - g.time(s);
            CHECK(rp.chen(s, t)(0, 0) == doctest::Approx(dt * dt / 2.0).epsilon(1e-14));
        }
    CHECK_THROWS_AS(rp.chen(2, 20), std::out_of_range);
}

TEST_CASE("chen reconstruction of a zero-cell lift is the left-point sum") {
    std::mt19937_64 rng = seeded_engine(7);
    Grid g = testing::random_grid(rng, 20);
    SampledPath x = testing::random_path(rng, g, 2);
    RoughPath rp = RoughPath::zero_cells(x);
    for (auto [s, t] : {std::pair<std::size_t, std::size_t>{0, 19}, {3, 11}, {5, 6}}) {
        Mat direct = Mat::Zero(2, 2);
        for (std::size_t k = s; k < t; ++k)
            direct += x.increment(s, k) * x.increment(k, k + 1).transpose();
        CHECK((rp.chen(s, t) - direct).norm() <= 1e-12 * (1.0 + direct.norm()));
    }
}

TEST_CASE("chen relation holds for random cell data") {
    std::mt19937_64 rng = seeded_engine(13);
    Grid g = testing::random_grid(rng, 24);
    RoughPath rp = testing::random_rough_path(rng, g, 2);
    const auto& x = rp.path();
    for (std::size_t s = 0; s < 24; s += 3)
        for (std::size_t u = s; u < 24; u += 4)
            for (std::size_t t = u; t < 24; t += 5) {
                const Mat glued = rp.chen(s, u) + rp.chen(u, t) +
                                  x.increment(s, u) * x.increment(u, t).transpose();
                CHECK((rp.chen(s, t) - glued).norm() <= 1e-12 * (1.0 + glued.norm()));
            }
}

TEST_CASE("chen row matches individual reconstruction") {
    std::mt19937_64 rng = seeded_engine(5);
    Grid g = testing::random_grid(rng, 15);
    RoughPath rp = testing::random_rough_path(rng, g, 3);
    const auto row = rp.chen_row(2, 12);
    for (std::size_t v = 2; v <= 12; ++v) CHECK((row[v - 2] - rp.chen(2, v)).norm() == 0.0);
}

TEST_CASE("controlled path remainder") {
    Grid g({0.0, 0.5, 1.0});
    auto driver = std::make_shared<const SampledPath>(
        SampledPath::sample(g, 1, [](double t) { return Vec::Constant(1, t); }));

    SUBCASE("driver against itself vanishes") {
        ControlledPath cp = ControlledPath::of_driver(driver);
        for (std::size_t s = 0; s < 3; ++s)
            for (std::size_t t = s; t < 3; ++t) CHECK(cp.remainder(s, t).norm() == 0.0);
    }

    SUBCASE("constant path with zero derivative vanishes") {
        ControlledPath cp = ControlledPath::constant(driver, Vec::Constant(1, 4.0));
        CHECK(cp.remainder(0, 2).norm() == 0.0);
        CHECK(cp.remainder(1, 1).norm() == 0.0);
    }

    SUBCASE("quadratic against linear driver") {
        std::vector<Vec> values{Vec::Constant(1, 0.0), Vec::Constant(1, 0.25), Vec::Constant(1, 1.0)};
        std::vector<Mat> gubs{Mat::Constant(1, 1, 0.0), Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, 2.0)};
        ControlledPath cp(driver, 1, 1, values, gubs);
        CHECK(cp.remainder(0, 2)[0] == doctest::Approx(1.0));  // 1 - 0*1
        CHECK(cp.remainder(0, 1)[0] == doctest::Approx(0.25));
        CHECK(cp.remainder(1, 2)[0] == doctest::Approx(0.25));  // 0.75 - 1*0.5
    }
}

TEST_CASE("restriction commutes with remainder and chen") {
    std::mt19937_64 rng = seeded_engine(11);
    Grid g = testing::random_grid(rng, 18);
    RoughPath rp = testing::random_rough_path(rng, g, 2);
    ControlledPath cp = testing::random_controlled(rng, rp.path_ptr(), 2, 1);

    RoughPath sub_rp = rp.restricted(4, 14);
    ControlledPath sub_cp = cp.restricted(4, 14);
    for (std::size_t s = 0; s <= 10; s += 2)
        for (std::size_t t = s; t <= 10; t += 3) {
            CHECK((sub_rp.chen(s, t) - rp.chen(s + 4, t + 4)).norm() == 0.0);
            CHECK((sub_cp.remainder(s, t) - cp.remainder(s + 4, t + 4)).norm() == 0.0);
        }
}

TEST_CASE("second-order application matches the tensor contraction") {
    std::mt19937_64 rng = seeded_engine(3);
    const int rows = 2, cols = 3;
    std::normal_distribution<double> n(0.0, 1.0);
    Mat gub(rows * cols, cols);
    Mat xx(cols, cols);
    for (int i = 0; i < gub.rows(); ++i)
        for (int j = 0; j < gub.cols(); ++j) gub(i, j) = n(rng);
    for (int i = 0; i < cols; ++i)
        for (int j = 0; j < cols; ++j) xx(i, j) = n(rng);
    const Vec out = apply_second_order(gub, rows, cols, xx);
    for (int a = 0; a < rows; ++a) {
        double want = 0.0;
        for (int b = 0; b < cols; ++b)
            for (int c = 0; c < cols; ++c) want += gub(c * rows + a, b) * xx(b, c);
        CHECK(out[a] == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("truncation freezes values and derivatives") {
    std::mt19937_64 rng = seeded_engine(17);
    Grid g = testing::random_grid(rng, 10);
    auto driver = std::make_shared<const SampledPath>(testing::random_path(rng, g, 2));
    ControlledPath cp = testing::random_controlled(rng, driver, 1, 1);
    ControlledPath cut = cp.truncated_after(4);
    for (std::size_t i = 0; i <= 4; ++i) CHECK((cut.value(i) - cp.value(i)).norm() == 0.0);
    for (std::size_t i = 5; i < 10; ++i) {
        CHECK((cut.value(i) - cp.value(4)).norm() == 0.0);
        CHECK((cut.gubinelli(i) - cp.gubinelli(4)).norm() == 0.0);
    }
}
