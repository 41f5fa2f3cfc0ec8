#include <doctest.h>

#include <random>

#include "muskat/errors.hpp"
#include "muskat/params.hpp"

using namespace muskat;

TEST_CASE("Atwood number from viscosities") {
    FluidParams p;
    p.mu_minus = 3.0;
    p.mu_plus = 1.0;
    CHECK(derive_constants(p).a_mu == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("buoyancy constant") {
    FluidParams p;
    p.g = 9.8;
    p.rho_minus = 2.0;
    p.rho_plus = 1.0;
    CHECK(derive_constants(p).theta == doctest::Approx(9.8).epsilon(1e-15));
}

TEST_CASE("c_rho_mu with unit viscosities and permeability") {
    FluidParams p;
    p.g = 1.0;
    p.rho_minus = 1.0;
    const DerivedConstants c = derive_constants(p);
    CHECK(c.theta == 1.0);
    CHECK(c.c_rho_mu == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.b_mu == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("viscous contribution of the far-field speed") {
    FluidParams p;
    p.mu_minus = 2.0;
    p.mu_plus = 1.0;
    p.V = 0.5;
    p.k = 0.25;
    CHECK(derive_constants(p).theta == doctest::Approx(2.0));
}

TEST_CASE("normalized constructor") {
    for (double a : {-0.9, -0.5, 0.0, 0.3, 0.9}) {
        const FluidParams p = FluidParams::normalized(a, 1.5, 2.0);
        const DerivedConstants c = derive_constants(p);
        CHECK(c.b_mu == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(c.a_mu == doctest::Approx(a).epsilon(1e-14));
        CHECK(c.theta == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(p.sigma == 2.0);
    }
    CHECK(derive_constants(FluidParams::normalized(0.2, -0.7)).theta == doctest::Approx(-0.7));
    CHECK(FluidParams::normalized(0.0, 0.0).sigma == 1.0);
    CHECK_THROWS_AS(FluidParams::normalized(1.0, 1.0), InvalidConfiguration);
}

TEST_CASE("invalid configurations are rejected") {
    FluidParams p;
    p.k = 0.0;
    CHECK_THROWS_AS(derive_constants(p), InvalidConfiguration);
    CHECK_THROWS_AS(p.validate(), InvalidConfiguration);

    FluidParams q;
    q.mu_minus = 0.0;
    q.mu_plus = 0.0;
    CHECK_THROWS_AS(derive_constants(q), InvalidConfiguration);

    FluidParams s;
    s.sigma = -1.0;
    CHECK_THROWS_AS(s.validate(), InvalidConfiguration);

    FluidParams n;
    n.g = std::nan("");
    CHECK_THROWS_AS(n.validate(), InvalidConfiguration);

    FluidParams ok;
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("property: Atwood number stays in (-1, 1)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> logmu(-6.0, 6.0);
    for (int i = 0; i < 2000; ++i) {
        FluidParams p;
        p.mu_minus = std::pow(10.0, logmu(rng));
        p.mu_plus = std::pow(10.0, logmu(rng) * 0.5);
        const double a = derive_constants(p).a_mu;
        CHECK(a > -1.0);
        CHECK(a < 1.0);
    }
}

TEST_CASE("property: theta vanishes without density jump and viscous drive") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int i = 0; i < 200; ++i) {
        FluidParams p;
        p.rho_minus = p.rho_plus = u(rng);
        p.g = u(rng);
        p.mu_minus = u(rng);
        p.mu_plus = u(rng);
        p.V = 0.0;
        DerivedConstants c = derive_constants(p);
        CHECK(c.theta == 0.0);
        CHECK(c.c_rho_mu == 0.0);
        p.mu_plus = p.mu_minus;
        p.V = u(rng);
        c = derive_constants(p);
        CHECK(c.theta == 0.0);
        CHECK(c.c_rho_mu == 0.0);
    }
}

TEST_CASE("property: viscosity scaling") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        FluidParams p;
        p.mu_minus = u(rng);
        p.mu_plus = u(rng);
        p.k = u(rng);
        const double lambda = u(rng);
        FluidParams q = p;
        q.mu_minus *= lambda;
        q.mu_plus *= lambda;
        const DerivedConstants a = derive_constants(p), b = derive_constants(q);
        CHECK(b.a_mu == doctest::Approx(a.a_mu).epsilon(1e-13));
        CHECK(b.b_mu == doctest::Approx(a.b_mu / lambda).epsilon(1e-13));
        // Deterministic.
        CHECK(derive_constants(p).a_mu == a.a_mu);
    }
}
