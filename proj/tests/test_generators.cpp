#include <doctest.h>

#include <random>

#include "freeprob/freeconv.hpp"
#include "freeprob/generators.hpp"
#include "support/closed_forms.hpp"
#include "support/random_measures.hpp"

using namespace freeprob;

namespace {

const Complex I{0.0, 1.0};

GeneratorPair semicircle_pair() { return {0.0, Measure::point_mass(0.0)}; }
GeneratorPair free_poisson_pair() { return {0.5, Measure::finite({{1.0, 0.5}})}; }

GeneratorPair random_pair(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Measure base = testutil::random_measure(rng);
    // random finite sigma: rescaled probability measure
    const double scale = 0.2 + 2.0 * unit(rng);
    const Measure sigma = reweight(base, [scale](double) { return scale; });
    return {4.0 * unit(rng) - 2.0, sigma};
}

} // namespace

TEST_SUITE("generators") {

TEST_CASE("phi_free: closed forms") {
    CHECK(std::abs(phi_free({3.0, Measure::zero()}, Complex(0.3, 1.0)) - 3.0) <= 1e-15);
    CHECK(std::abs(phi_free(semicircle_pair(), I) - (-I)) <= 1e-15); // phi = 1/z
    // (1/2, delta_1/2): phi(z) = z/(z-1); at 2i this is (4-2i)/5
    CHECK(std::abs(phi_free(free_poisson_pair(), 2.0 * I) - Complex(0.8, -0.4)) <= 1e-15);
}

TEST_CASE("phi_free derivative matches finite differences") {
    std::mt19937_64 rng(10001);
    for (int rep = 0; rep < 10; ++rep) {
        const GeneratorPair g = random_pair(rng);
        const Complex z(0.4, 2.1);
        const double h = 1e-6;
        const Complex fd = (phi_free(g, z + h) - phi_free(g, z - h)) / (2.0 * h);
        CHECK(std::abs(phi_free_derivative(g, z) - fd) <= 1e-6 * (1.0 + std::abs(fd)));
    }
}

TEST_CASE("char_exponent_classical: closed forms") {
    for (double t : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
        CHECK(std::abs(char_exponent_classical(semicircle_pair(), t) - (-0.5 * t * t)) <= 1e-12);
        // Poisson(1): e^{it} - 1
        const Complex expected = std::polar(1.0, t) - 1.0;
        CHECK(std::abs(char_exponent_classical(free_poisson_pair(), t) - expected) <= 1e-12);
        // pure drift
        CHECK(std::abs(char_exponent_classical({0.7, Measure::zero()}, t) -
                       Complex(0.0, 0.7 * t)) <= 1e-15);
    }
}

TEST_CASE("materialize_free: semicircle, free Poisson, point mass") {
    const Measure sc = materialize_free(semicircle_pair(), GridSpec(-3.0, 3.0, 2048));
    CHECK(levy_distance(sc, oracle::semicircle_measure(1.0, 16384)) <= 5e-3);

    const Measure mp = materialize_free(free_poisson_pair(), GridSpec(-1.0, 5.0, 2048));
    CHECK(levy_distance(mp, oracle::quantile_comb(oracle::mp1_cdf, 0.0, 4.0, 8192)) <= 1e-2);

    const Measure pm = materialize_free({-1.3, Measure::zero()}, GridSpec(-3.0, 3.0, 128));
    CHECK(pm == Measure::point_mass(-1.3));
}

TEST_CASE("materialize_classical: gaussian, Poisson, point mass") {
    const Measure g = materialize_classical(semicircle_pair(), GridSpec(-8.0, 8.0, 2048));
    const Measure target = oracle::gaussian_measure(1.0, 16384);
    CHECK(kolmogorov_distance(g, target) <= 1e-3);

    const Measure p = materialize_classical(free_poisson_pair(), GridSpec(-1.0, 30.0, 256));
    REQUIRE(p.purely_atomic());
    for (int k = 0; k <= 6; ++k) {
        double expected = std::exp(-1.0);
        for (int j = 1; j <= k; ++j) expected /= double(j);
        CHECK(std::abs(p.atom_mass_at(double(k)) - expected) <= 1e-3);
    }

    const Measure pm = materialize_classical({0.25, Measure::zero()}, GridSpec(-3.0, 3.0, 128));
    CHECK(pm == Measure::point_mass(0.25));
}

TEST_CASE("property: Im phi_free <= 0 on the upper half-plane") {
    std::mt19937_64 rng(10002);
    std::uniform_real_distribution<double> re(-5.0, 5.0), im(0.01, 5.0);
    int samples = 0;
    while (samples < 1000) {
        const GeneratorPair g = random_pair(rng);
        for (int i = 0; i < 50; ++i, ++samples) {
            const Complex z(re(rng), im(rng));
            CHECK(phi_free(g, z).imag() <= 1e-12);
        }
    }
}

TEST_CASE("property: phi_free(iy) = o(y)") {
    std::mt19937_64 rng(10003);
    for (int rep = 0; rep < 10; ++rep) {
        const GeneratorPair g = random_pair(rng);
        double prev = std::numeric_limits<double>::infinity();
        for (double y : {10.0, 100.0, 1000.0}) {
            const double q = std::abs(phi_free(g, Complex(0.0, y))) / y;
            CHECK(q < prev);
            prev = q;
        }
    }
}

TEST_CASE("property: free semigroup under generator addition") {
    const GeneratorPair a = semicircle_pair();
    const GeneratorPair b = free_poisson_pair();
    const Measure parts[] = {a.sigma, b.sigma};
    const GeneratorPair sum{a.gamma + b.gamma, superpose(parts)};

    const Measure ma = materialize_free(a, GridSpec(-3.0, 3.0, 2048));
    const Measure mb = materialize_free(b, GridSpec(-1.0, 5.0, 2048));
    const Measure direct = materialize_free(sum, GridSpec(-4.0, 7.0, 2048));
    const Measure convolved = free_convolve(ma, mb);
    CHECK(levy_distance(direct, convolved) <= 1e-2);
}

TEST_CASE("property: |exp(char exponent)| <= 1") {
    std::mt19937_64 rng(10004);
    for (int rep = 0; rep < 10; ++rep) {
        const GeneratorPair g = random_pair(rng);
        for (double t = -30.0; t <= 30.0; t += 0.37)
            CHECK(std::abs(std::exp(char_exponent_classical(g, t))) <= 1.0 + 1e-12);
    }
}

TEST_CASE("generator pair json round trip") {
    const GeneratorPair g = free_poisson_pair();
    const GeneratorPair back = generator_pair_from_json(generator_pair_to_json(g));
    CHECK(back.gamma == g.gamma);
    CHECK(back.sigma == g.sigma);
}

} // TEST_SUITE
