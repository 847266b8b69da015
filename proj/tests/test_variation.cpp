#include "doctest.h"

#include <cmath>

#include "rfde/variation.hpp"
#include "test_helpers.hpp"

using namespace rfde;

TEST_CASE("pvar on simple paths") {
    Grid g = Grid::uniform(0.0, 1.0, 3);
    SUBCASE("monotone path, p = 1, gives the net increment") {
        SampledPath x = SampledPath::scalar(g, {0.0, 0.5, 0.8, 2.0});
        CHECK(pvar(x, 1.0) == doctest::Approx(2.0));
    }
    SUBCASE("oscillating path, p = 2, takes the full partition") {
        SampledPath x = SampledPath::scalar(g, {0.0, 1.0, 0.0, 1.0});
        CHECK(pvar(x, 2.0) == doctest::Approx(std::sqrt(3.0)));
        CHECK(pvar(x, 2.0) == brute_force_pvar(x, 2.0, 0, 3));
    }
    SUBCASE("constant path vanishes for any p") {
        SampledPath x = SampledPath::constant(g, Vec::Constant(2, 7.0));
        for (double p : {1.0, 1.7, 2.5, 3.0}) CHECK(pvar(x, p) == 0.0);
    }
    SUBCASE("p below 1 is rejected") {
        SampledPath x = SampledPath::scalar(g, {0.0, 1.0, 0.0, 1.0});
        CHECK_THROWS_AS(pvar(x, 0.5), std::invalid_argument);
    }
}

TEST_CASE("pvar equals the enumeration oracle exactly") {
    std::mt19937_64 rng = seeded_engine(23);
    std::uniform_int_distribution<int> len(2, 14);
    std::uniform_int_distribution<int> dim(1, 3);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = len(rng);
        Grid g = testing::random_grid(rng, static_cast<std::size_t>(n));
        SampledPath x = testing::random_path(rng, g, dim(rng));
        for (double p : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
            const std::size_t last = x.size() - 1;
            CHECK(pvar(x, p, 0, last) == brute_force_pvar(x, p, 0, last));
        }
    }
}

TEST_CASE("pvar monotonicity and scaling") {
    std::mt19937_64 rng = seeded_engine(29);
    Grid g = testing::random_grid(rng, 30);
    SampledPath x = testing::random_path(rng, g, 2);
    const double p = 2.5;
    CHECK(pvar(x, p, 5, 20) <= pvar(x, p, 3, 25) + 1e-15);
    CHECK(pvar(x, p, 0, 12) <= pvar(x, p, 0, 29) + 1e-15);

    std::vector<Vec> scaled;
    for (std::size_t i = 0; i < x.size(); ++i) scaled.push_back(Vec(x.value(i) * -3.5));
    SampledPath y(g, std::move(scaled));
    CHECK(pvar(y, p) == doctest::Approx(3.5 * pvar(x, p)).epsilon(1e-12));
}

TEST_CASE("pvar2 basics") {
    SUBCASE("zero lift vanishes") {
        Grid g = Grid::uniform(0.0, 1.0, 6);
        RoughPath rp = RoughPath::zero_cells(SampledPath::constant(g, Vec::Zero(2)));
        CHECK(pvar2(rp, 2.5) == 0.0);
    }
    SUBCASE("single cell returns its Frobenius norm") {
        Grid g = Grid::uniform(0.0, 1.0, 1);
        SampledPath x = SampledPath::constant(g, Vec::Zero(2));
        Mat cell(2, 2);
        cell << 1.0, 2.0, -1.0, 0.5;
        RoughPath rp(x, {cell});
        CHECK(pvar2(rp, 2.5) == doctest::Approx(cell.norm()).epsilon(1e-14));
    }
    SUBCASE("smooth driver on a dyadic grid matches enumeration exactly") {
        Grid g = Grid::uniform(0.0, 1.0, 4);
        RoughPath rp = RoughPath::exact_linear(g, Vec::Ones(1));
        CHECK(pvar2(rp, 2.5) == brute_force_pvar2(rp, 2.5, 0, 4));
    }
    SUBCASE("random lifts agree with enumeration to rounding") {
        std::mt19937_64 rng = seeded_engine(31);
        for (int rep = 0; rep < 30; ++rep) {
            Grid g = testing::random_grid(rng, 10);
            RoughPath rp = testing::random_rough_path(rng, g, 2);
            const double a = pvar2(rp, 2.5, 0, 9);
            const double b = brute_force_pvar2(rp, 2.5, 0, 9);
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
    SUBCASE("p outside (2,3) is rejected") {
        Grid g = Grid::uniform(0.0, 1.0, 2);
        RoughPath rp = RoughPath::zero_cells(SampledPath::constant(g, Vec::Zero(1)));
        CHECK_THROWS_AS(pvar2(rp, 2.0), std::invalid_argument);
        CHECK_THROWS_AS(pvar2(rp, 3.0), std::invalid_argument);
    }
}

TEST_CASE("controlled norm") {
    SUBCASE("driver against itself: only the identity term survives") {
        Grid g = Grid::uniform(0.0, 1.0, 5);
        auto driver = std::make_shared<const SampledPath>(
            SampledPath::sample(g, 2, [](double t) { return Vec::Constant(2, t); }));
        ControlledPath cp = ControlledPath::of_driver(driver);
        CHECK(controlled_norm(cp, 2.5) == doctest::Approx(std::sqrt(2.0)));
    }
    SUBCASE("constant path vanishes") {
        Grid g = Grid::uniform(0.0, 1.0, 5);
        auto driver = std::make_shared<const SampledPath>(
            SampledPath::sample(g, 1, [](double t) { return Vec::Constant(1, t); }));
        CHECK(controlled_norm(ControlledPath::constant(driver, Vec::Ones(1)), 2.5) == 0.0);
    }
    SUBCASE("quadratic example evaluates the defining three-term sum") {
        Grid g = Grid::uniform(0.0, 1.0, 2);
        auto driver = std::make_shared<const SampledPath>(
            SampledPath::sample(g, 1, [](double t) { return Vec::Constant(1, t); }));
        std::vector<Vec> values{Vec::Constant(1, 0.0), Vec::Constant(1, 0.25), Vec::Constant(1, 1.0)};
        std::vector<Mat> gubs{Mat::Constant(1, 1, 0.0), Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, 2.0)};
        ControlledPath cp(driver, 1, 1, values, gubs);
        const double p = 2.5;
        // |Y'_0| = 0; ||Y'||_p = 2 (monotone); ||R||_{p/2}: coarsest partition wins with R_{0,1} = 1
        CHECK(controlled_norm(cp, p) == doctest::Approx(0.0 + 2.0 + 1.0).epsilon(1e-13));
    }
}

TEST_CASE("controlled distance") {
    std::mt19937_64 rng = seeded_engine(37);
    Grid g = testing::random_grid(rng, 12);
    auto driver = std::make_shared<const SampledPath>(testing::random_path(rng, g, 2));
    ControlledPath a = testing::random_controlled(rng, driver, 2, 1);
    ControlledPath b = testing::random_controlled(rng, driver, 2, 1);
    ControlledPath c = testing::random_controlled(rng, driver, 2, 1);
    const double p = 2.5;
    CHECK(controlled_distance(a, a, p) == 0.0);
    CHECK(controlled_distance(a, b, p) == doctest::Approx(controlled_distance(b, a, p)).epsilon(1e-13));
    const double ab = controlled_distance(a, b, p);
    const double bc = controlled_distance(b, c, p);
    const double ac = controlled_distance(a, c, p);
    CHECK(ac <= (ab + bc) * (1.0 + 1e-10));
}

TEST_CASE("rough norm and distance") {
    std::mt19937_64 rng = seeded_engine(41);
    Grid g = testing::random_grid(rng, 12);
    RoughPath a = testing::random_rough_path(rng, g, 2);
    RoughPath zero = RoughPath::zero_cells(SampledPath::constant(g, Vec::Zero(2)));
    const double p = 2.5;
    CHECK(rough_distance(a, a, p) == 0.0);
    CHECK(rough_distance(a, zero, p) == doctest::Approx(rough_norm(a, p)).epsilon(1e-12));
}

TEST_CASE("control function") {
    std::mt19937_64 rng = seeded_engine(43);
    Grid g = testing::random_grid(rng, 16);
    auto rp = std::make_shared<const RoughPath>(testing::random_rough_path(rng, g, 2));
    ControlFunction w = control_w(rp, 2.5);

    SUBCASE("vanishes on the diagonal") {
        for (std::size_t s = 0; s < 16; s += 5) CHECK(w(s, s) == 0.0);
    }
    SUBCASE("superadditive on grid triples") {
        for (std::size_t s = 0; s < 16; s += 2)
            for (std::size_t u = s; u < 16; u += 3)
                for (std::size_t t = u; t < 16; t += 2)
                    CHECK(w(s, u) + w(u, t) <= w(s, t) + 1e-12 * (1.0 + w(s, t)));
    }
    SUBCASE("monotone in interval inclusion") {
        CHECK(w(4, 10) <= w(2, 12) + 1e-14);
        CHECK(w(0, 8) <= w(0, 15) + 1e-14);
    }
}

TEST_CASE("control partition stays below gamma and is maximal") {
    std::mt19937_64 rng = seeded_engine(47);
    Grid g = testing::random_grid(rng, 40);
    auto rp = std::make_shared<const RoughPath>(testing::random_rough_path(rng, g, 2));
    const double p = 2.5;
    const double gamma = 0.5 * detail::pvar_pow_sum(rp->path(), p, 0, 39);
    const auto taus = control_partition(*rp, p, gamma);
    REQUIRE(taus.front() == 0);
    REQUIRE(taus.back() == 39);
    ControlFunction w = control_w(rp, p);
    for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
        CHECK(w(taus[i], taus[i + 1] - 1) < gamma);
        if (taus[i + 1] < 39)  // maximality: extending one point would breach gamma
            CHECK(w(taus[i], taus[i + 1]) >= gamma * (1.0 - 1e-12));
    }
}
