#include <cmath>
#include <random>

#include "doctest.h"
#include "letf/black_scholes.hpp"
#include "letf/errors.hpp"

using namespace letf;
using doctest::Approx;

TEST_CASE("call and put prices") {
    CHECK(bs_call_price({0.2, 1.0, 0.0, 0.0}) == Approx(0.0796557).epsilon(1e-6));
    CHECK(bs_put_price({0.2, 1.0, 0.0, 0.0}) == Approx(0.0796557).epsilon(1e-6));
    CHECK(bs_call_price({50.0, 1.0, 0.0, 0.0}) == Approx(1.0).epsilon(1e-9));
    CHECK(bs_call_price({0.2, 1.0, 0.0, 40.0}) < 1e-300);
    CHECK(bs_put_price({0.2, 1.0, 0.0, -40.0}) < 1e-300);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 100; ++i) {
        const BsInputs in{0.05 + std::abs(u(rng)), 0.1 + std::abs(u(rng)), u(rng), u(rng)};
        const double res = bs_call_price(in) - bs_put_price(in) - std::exp(in.z) + std::exp(in.k);
        CHECK(std::abs(res) < 1e-14);
    }
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(bs_call_price({0.0, 1.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(bs_call_price({0.2, -1.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(bs_vega({-0.2, 1.0, 0.0, 0.0}), DomainError);
}

TEST_CASE("implied vol") {
    const double p = bs_call_price({0.37, 0.5, 0.1, 0.05});
    CHECK(implied_vol(p, 0.5, 0.1, 0.05) == Approx(0.37).epsilon(1e-10));
    CHECK(implied_vol(0.0796557, 1.0, 0.0, 0.0) == Approx(0.2).epsilon(1e-6));

    CHECK_THROWS_AS(implied_vol(std::exp(0.1) - std::exp(0.05), 0.5, 0.1, 0.05), ArbitrageError);
    CHECK_THROWS_AS(implied_vol(std::exp(0.1), 0.5, 0.1, 0.05), ArbitrageError);
    CHECK_THROWS_AS(implied_vol(-1e-3, 0.5, 0.0, 0.2), ArbitrageError);

    // Deep in-the-money calls are inverted through the put side.
    const double itm = bs_call_price({0.25, 0.25, 0.0, -0.5});
    CHECK(implied_vol(itm, 0.25, 0.0, -0.5) == Approx(0.25).epsilon(1e-9));
    for (double s : {0.01, 0.1, 1.0, 3.0}) {
        const double c = bs_call_price({s, 1.0, 0.0, 0.05});
        CHECK(std::abs(implied_vol(c, 1.0, 0.0, 0.05) - s) < 1e-10);
    }
}

TEST_CASE("solver reports its bracket") {
    ImpliedVolOptions opt;
    opt.max_iter = 1;
    opt.price_tol = 1e-300;
    try {
        implied_vol(bs_call_price({0.9, 1.0, 0.0, 0.3}), 1.0, 0.0, 0.3, opt);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.lo() <= e.hi());
    }
}

TEST_CASE("vega ratios at the money") {
    const double s = 0.3, t = 0.7;
    CHECK(vega_ratio(2, {s, t, 0.1, 0.1}) == Approx(-t * s / 4).epsilon(1e-12));
    CHECK(vega_ratio(3, {s, t, 0.1, 0.1}) == Approx(t * t * s * s / 16 - t / 4).epsilon(1e-12));
    CHECK_THROWS_AS(vega_ratio(4, {s, t, 0.0, 0.0}), DomainError);
}

TEST_CASE("vega ratio 2 matches finite differences") {
    for (double lam : {-0.2, 0.1, 0.3}) {
        const BsInputs in{0.35, 0.8, 0.0, lam};
        const double h = 1e-4;
        auto price = [&](double s) { return bs_call_price({s, in.tau, in.z, in.k}); };
        const double d2 = (price(0.35 + h) - 2 * price(0.35) + price(0.35 - h)) / (h * h);
        CHECK(vega_ratio(2, in) == Approx(d2 / bs_vega(in)).epsilon(1e-6));
    }
}

TEST_CASE("Hermite polynomials") {
    CHECK(hermite(0, 0.7) == 1.0);
    CHECK(hermite(1, 0.7) == Approx(1.4));
    CHECK(hermite(2, 0.7) == Approx(4 * 0.49 - 2));
    CHECK(hermite(3, 0.5) == Approx(8 * 0.125 - 12 * 0.5));
    const auto c4 = hermite_coefficients(4);
    REQUIRE(c4.size() == 5);
    CHECK(c4[0] == 12);
    CHECK(c4[2] == -48);
    CHECK(c4[4] == 16);
    CHECK_THROWS_AS(hermite_vega_ratio(kMaxHermiteOrder + 1, {0.2, 1.0, 0.0, 0.0}), DomainError);
}

TEST_CASE("Hermite vega ratio") {
    const double s = 0.25, t = 0.5;
    // w = 0 when k = z - sigma^2 tau / 2.
    CHECK(hermite_vega_ratio(0, {s, t, 0.0, -s * s * t / 2}) == Approx(1.0 / (t * s)));
    CHECK(hermite_vega_ratio(1, {s, t, 0.0, -s * s * t / 2}) == Approx(0.0));

    // m = 1 against a central difference of (d_z^2 - d_z) u in z.
    const BsInputs in{s, t, 0.0, 0.12};
    auto g = [&](double z) {
        const double sd = s * std::sqrt(t);
        return std::exp(z) * normal_pdf((z - in.k + 0.5 * sd * sd) / sd) / sd;
    };
    const double h = 1e-4;
    const double fd = (g(h) - g(-h)) / (2 * h) / bs_vega(in);
    CHECK(hermite_vega_ratio(1, in) == Approx(fd).epsilon(1e-5));
    // m = 0 is the heat-equation identity vega = tau sigma (d_z^2 - d_z) u.
    CHECK(hermite_vega_ratio(0, in) == Approx(g(0.0) / bs_vega(in)).epsilon(1e-12));
}
