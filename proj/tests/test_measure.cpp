#include <doctest.h>

#include <random>

#include "freeprob/measure.hpp"
#include "freeprob/measure_io.hpp"
#include "support/closed_forms.hpp"
#include "support/random_measures.hpp"

using namespace freeprob;

namespace {
Measure bernoulli_pm1() { return Measure::probability({{-1.0, 0.5}, {1.0, 0.5}}); }
}

TEST_SUITE("measure") {

TEST_CASE("construction enforces the invariants") {
    CHECK_THROWS_AS(Measure::probability({{0.0, -0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(Measure::probability({}), std::invalid_argument); // no mass
    DensityGrid bad;
    bad.lo = 1.0;
    bad.hi = 0.0;
    bad.values = {1.0, 1.0};
    CHECK_THROWS_AS(Measure::probability({}, bad), std::invalid_argument);

    const Measure m = Measure::probability({{1.0, 2.0}, {-1.0, 2.0}, {1.0, 2.0}});
    CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(m.atoms().size() == 2); // merged duplicates, sorted
    CHECK(m.atoms()[0].x == -1.0);
    CHECK(m.atoms()[1].x == 1.0);
    CHECK(m.atoms()[1].w == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("cdf: point masses and symmetry") {
    const Measure d0 = Measure::point_mass(0.0);
    CHECK(d0.cdf(-1.0) == 0.0);
    CHECK(d0.cdf(0.0) == 1.0); // right-continuous
    CHECK(d0.cdf_left(0.0) == 0.0);

    CHECK(bernoulli_pm1().cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("cdf: semicircle at 0 is 1/2 (closed-form oracle)") {
    // independent quadrature of the closed-form density; x = -2 + u^2
    // removes the edge singularity
    const double half = oracle::simpson(
        [](double u) { return oracle::semicircle_density(-2.0 + u * u) * 2.0 * u; }, 0.0,
        std::sqrt(2.0));
    CHECK(half == doctest::Approx(0.5).epsilon(1e-9));
    const Measure sc = oracle::semicircle_measure(1.0, 32768);
    CHECK(sc.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("integrate: atoms and moments") {
    const Measure dc = Measure::point_mass(1.7);
    CHECK(dc.integrate([](double t) { return t; }) == doctest::Approx(1.7));
    CHECK(bernoulli_pm1().integrate([](double t) { return t * t; }) == doctest::Approx(1.0));

    // second moment of the standard semicircle is 1
    const Measure sc = oracle::semicircle_measure(1.0, 32768);
    CHECK(sc.integrate([](double t) { return t * t; }) == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(dc.integrate([](double t) { return 1.0 / (t - 1.7); }), numeric_error);
}

TEST_CASE("tail_mass") {
    CHECK(Measure::point_mass(0.0).tail_mass(0.5) == 0.0);
    CHECK(bernoulli_pm1().tail_mass(0.5) == doctest::Approx(1.0));
    // atoms at +-1/2 are strictly inside (-0.6, 0.6)
    const Measure b4 = Measure::probability({{-0.5, 0.5}, {0.5, 0.5}});
    CHECK(b4.tail_mass(0.6) == 0.0);
    // boundary atoms count toward the tail
    CHECK(b4.tail_mass(0.5) == doctest::Approx(1.0));
}

TEST_CASE("levy distance: identity, point masses, kolmogorov variant") {
    const Measure b = bernoulli_pm1();
    CHECK(levy_distance(b, b) == 0.0);
    CHECK(levy_distance(Measure::point_mass(0.0), Measure::point_mass(0.3)) ==
          doctest::Approx(0.3).epsilon(1e-6));
    CHECK(kolmogorov_distance(Measure::point_mass(0.0), Measure::point_mass(1.0)) ==
          doctest::Approx(1.0));
}

TEST_CASE("shift: translation and round trip") {
    CHECK(Measure::point_mass(0.0).shifted(2.0) == Measure::point_mass(2.0));
    const Measure b = bernoulli_pm1();
    CHECK(b.shifted(0.25).atoms()[0].x == doctest::Approx(-0.75));
    CHECK(b.shifted(0.25).atoms()[1].x == doctest::Approx(1.25));

    std::mt19937_64 rng(7001);
    for (int i = 0; i < 20; ++i) {
        const Measure m = testutil::random_measure(rng);
        const Measure back = m.shifted(0.37).shifted(-0.37);
        CHECK(levy_distance(m, back) <= 1e-9);
    }
}

TEST_CASE("property: cdf is monotone nondecreasing") {
    std::mt19937_64 rng(7002);
    std::uniform_real_distribution<double> x(-6.0, 6.0);
    for (int rep = 0; rep < 10; ++rep) {
        const Measure m = testutil::random_measure(rng);
        for (int i = 0; i < 1000; ++i) {
            double a = x(rng), b = x(rng);
            if (a > b) std::swap(a, b);
            CHECK(m.cdf(a) <= m.cdf(b) + 1e-15);
        }
    }
}

TEST_CASE("property: integrate is linear") {
    std::mt19937_64 rng(7003);
    auto f = [](double t) { return std::sin(3.0 * t) + t; };
    auto g = [](double t) { return std::cos(t) * t * t; };
    for (int rep = 0; rep < 25; ++rep) {
        const Measure m = testutil::random_measure(rng);
        const double lhs = m.integrate([&](double t) { return f(t) + g(t); });
        const double rhs = m.integrate(f) + m.integrate(g);
        const double scale = 1.0 + std::abs(lhs) + std::abs(rhs);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
    }
}

TEST_CASE("property: levy distance satisfies the triangle inequality") {
    std::mt19937_64 rng(7004);
    for (int rep = 0; rep < 15; ++rep) {
        const Measure a = testutil::random_measure(rng);
        const Measure b = testutil::random_measure(rng);
        const Measure c = testutil::random_measure(rng);
        const double ab = levy_distance(a, b);
        const double bc = levy_distance(b, c);
        const double ac = levy_distance(a, c);
        CHECK(ac <= ab + bc + 1e-9);
        CHECK(ab == doctest::Approx(levy_distance(b, a)).epsilon(1e-9)); // symmetry
    }
}

TEST_CASE("property: shift preserves total mass exactly") {
    std::mt19937_64 rng(7005);
    for (int rep = 0; rep < 25; ++rep) {
        const Measure m = testutil::random_measure(rng);
        CHECK(m.shifted(1.234).total_mass() == m.total_mass());
    }
}

TEST_CASE("dilate: pushforward scaling") {
    const Measure b = bernoulli_pm1().dilated(0.5);
    CHECK(b.atoms()[0].x == doctest::Approx(-0.5));
    CHECK(b.total_mass() == doctest::Approx(1.0));
    const Measure sc = oracle::semicircle_measure(1.0, 4096);
    const Measure sc2 = sc.dilated(2.0);
    CHECK(sc2.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sc2.variance() == doctest::Approx(4.0).epsilon(1e-4));
}

TEST_CASE("superpose and reweight assemble finite measures") {
    const Measure parts[] = {Measure::point_mass(0.0), Measure::point_mass(1.0)};
    const Measure s = superpose(parts);
    CHECK(s.total_mass() == doctest::Approx(2.0));
    const Measure w = reweight(s, [](double t) { return t * t / (1.0 + t * t); });
    CHECK(w.total_mass() == doctest::Approx(0.5));
    REQUIRE(w.atoms().size() == 1); // the zero-weight atom at 0 is dropped
    CHECK(w.atoms()[0].x == 1.0);
}

TEST_CASE("json round trip is exact") {
    std::mt19937_64 rng(7006);
    for (int rep = 0; rep < 10; ++rep) {
        const Measure m = testutil::random_measure(rng);
        const Measure back = measure_from_json(measure_to_json(m), true);
        CHECK(back == m);
    }
    // non-probability measures survive too
    const Measure sigma = Measure::finite({{1.0, 0.5}});
    CHECK(measure_from_json(measure_to_json(sigma), false) == sigma);
}

TEST_CASE("quadrature nodes: split points partition the trapezoid sums") {
    std::mt19937_64 rng(7007);
    for (int rep = 0; rep < 10; ++rep) {
        const Measure m = testutil::random_measure(rng);
        const double split[] = {-1.0, 1.0};
        double full = 0.0, inner = 0.0, outer = 0.0;
        for (const auto& nd : m.quadrature_nodes(split)) {
            full += nd.w * nd.t;
            (std::abs(nd.t) < 1.0 ? inner : outer) += nd.w * nd.t;
        }
        CHECK(full == doctest::Approx(inner + outer).epsilon(1e-14));
        // unsplit node sum realizes integrate()
        double plain = 0.0;
        for (const auto& nd : m.quadrature_nodes()) plain += nd.w * nd.t;
        CHECK(plain == doctest::Approx(m.integrate([](double t) { return t; })).epsilon(1e-12));
    }
}

} // TEST_SUITE
