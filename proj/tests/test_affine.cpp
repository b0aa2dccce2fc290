#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fitness_ifs/affine.hpp"
#include "fitness_ifs/rng.hpp"

using namespace fitness_ifs;

TEST_CASE("fitness preset coefficients and probabilities") {
    const AffineFamily fam = AffineFamily::fitness(0.3, 0.4);
    REQUIRE(fam.map_count() == 2);
    CHECK(fam.map(0).a == 0.0);
    CHECK(fam.map(0).b == 0.3);
    CHECK(fam.prob(0) == 0.4);
    CHECK(fam.map(1).a == 0.3);
    CHECK(fam.map(1).b == 0.7);
    CHECK(fam.prob(1) == 0.6);
}

TEST_CASE("forward step examples") {
    const AffineFamily f05 = AffineFamily::fitness(0.5, 0.4);
    CHECK(forward_step({1.0, 0}, f05, 0).value == 0.5);

    // map 1 realizes theta + (1 - theta) u == u + (1 - u) theta
    const double u = 0.37, theta = 0.81;
    const AffineFamily fu = AffineFamily::fitness(u, 0.4);
    const double stepped = forward_step({theta, 3}, fu, 1).value;
    CHECK(stepped == Catch::Approx(theta + (1.0 - theta) * u).epsilon(1e-15));
    CHECK(stepped == Catch::Approx(u + (1.0 - u) * theta).epsilon(1e-15));

    const AffineFamily er = AffineFamily::erdos(0.25, 0.4);
    CHECK(forward_step({0.0, 0}, er, 0).value == 0.75);

    CHECK(forward_step({0.5, 0}, f05, 1).time == 1);
    CHECK_THROWS_AS(forward_step({0.5, 0}, f05, 2), std::out_of_range);
}

TEST_CASE("rho of the fitness family") {
    CHECK(AffineFamily::fitness(0.5, 0.17).rho() == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(AffineFamily::fitness(0.3, 0.4).rho() == Catch::Approx(0.54).epsilon(1e-15));
    CHECK(AffineFamily::erdos(0.3, 0.4).rho() == Catch::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("family validation rejects degenerate input") {
    // both slopes 1 -> no contraction
    CHECK_THROWS_AS(AffineFamily::custom({{0.0, 1.0}, {0.0, 1.0}}, {0.5, 0.5}),
                    std::invalid_argument);
    // probabilities must be positive and sum to one
    CHECK_THROWS_AS(AffineFamily::custom({{0.0, 0.5}, {0.5, 0.5}}, {0.7, 0.7}),
                    std::invalid_argument);
    CHECK_THROWS_AS(AffineFamily::custom({{0.0, 0.5}, {0.5, 0.5}}, {1.0, 0.0}),
                    std::invalid_argument);
    // coefficients must keep [0,1] invariant
    CHECK_THROWS_AS(AffineFamily::custom({{0.6, 0.6}, {0.0, 0.2}}, {0.5, 0.5}),
                    std::invalid_argument);
    // duplicate maps break injectivity
    CHECK_THROWS_AS(AffineFamily::custom({{0.1, 0.2}, {0.1, 0.2}}, {0.5, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(AffineFamily::fitness(0.0, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(AffineFamily::fitness(0.4, 1.0), std::invalid_argument);
}

TEST_CASE("reversed partial sum basics") {
    const AffineFamily fam = AffineFamily::fitness(0.3, 0.4);
    CHECK(reversed_partial_sum(fam, {}, 0.62) == 0.62);

    const std::vector<std::size_t> one{1};
    CHECK(reversed_partial_sum(fam, one, 0.5) ==
          Catch::Approx(0.3 + 0.7 * 0.5).epsilon(1e-15));
}

TEST_CASE("pathwise reversal identity") {
    // Oracle: explicit forward_step composition along the word.
    const AffineFamily fam = AffineFamily::fitness(0.3, 0.4);
    Rng rng(20250401);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::size_t> word(12);
        for (auto& j : word) j = fam.draw_index(rng);
        const double theta0 = uniform01(rng);

        ChainState state{theta0, 0};
        for (std::size_t j : word) state = forward_step(state, fam, j);

        std::vector<std::size_t> reversed(word.rbegin(), word.rend());
        const double tilde = reversed_partial_sum(fam, reversed, theta0);
        CHECK(std::fabs(state.value - tilde) <= 1e-14);
    }
}

TEST_CASE("reversal identity holds for general custom families") {
    Rng rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        // random admissible 3-map family
        std::vector<AffineMap> maps;
        for (int j = 0; j < 3; ++j) {
            const double a = 0.8 * uniform01(rng);
            const double b = (1.0 - a) * uniform01(rng) * 0.99;
            maps.push_back({a, b});
        }
        std::vector<double> probs{0.2, 0.3, 0.5};
        AffineFamily fam = AffineFamily::custom(maps, probs);

        std::vector<std::size_t> word(20);
        for (auto& j : word) j = fam.draw_index(rng);
        const double theta0 = uniform01(rng);

        double value = theta0;
        for (std::size_t j : word) value = fam.map(j)(value);
        std::vector<std::size_t> reversed(word.rbegin(), word.rend());
        CHECK(std::fabs(value - reversed_partial_sum(fam, reversed, theta0)) <= 1e-13);
    }
}

TEST_CASE("orbits contract by the product of slopes") {
    const AffineFamily fam = AffineFamily::fitness(0.45, 0.3);
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::size_t> word(15);
        double slope_product = 1.0;
        for (auto& j : word) {
            j = fam.draw_index(rng);
            slope_product *= fam.map(j).b;
        }
        const double t0 = uniform01(rng), t1 = uniform01(rng);
        const double d0 = std::fabs(forward_orbit({t0, 0}, fam, word).value -
                                    forward_orbit({t1, 0}, fam, word).value);
        CHECK(d0 == Catch::Approx(std::fabs(t0 - t1) * slope_product).margin(1e-14));
        CHECK(d0 <= std::fabs(t0 - t1) + 1e-14);
    }
}

TEST_CASE("values stay inside the unit interval") {
    const AffineFamily fam = AffineFamily::erdos(0.7, 0.25);
    Rng rng(5);
    ChainState state{uniform01(rng), 0};
    for (int t = 0; t < 2000; ++t) {
        state = forward_step(state, fam, fam.draw_index(rng));
        REQUIRE(state.value >= 0.0);
        REQUIRE(state.value <= 1.0);
    }
}
