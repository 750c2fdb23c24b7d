#include <doctest.h>

#include <cmath>
#include <random>

#include "expopt/errors.hpp"
#include "expopt/gaussian_pricing.hpp"
#include "oracles.hpp"

using namespace expopt;

TEST_CASE("gaussian_green normalization, mean and mode") {
    auto f = [](double x) { return gaussian_green(x, 1.0, 0.1, 0.2); };
    const double m = oracle::lower(f, 0.08) + oracle::upper(f, 0.08);
    CHECK(m == doctest::Approx(1.0).epsilon(1e-10));
    auto xf = [&](double x) { return x * f(x); };
    const double mean = oracle::lower(xf, 0.08) + oracle::upper(xf, 0.08);
    CHECK(mean == doctest::Approx(0.08).epsilon(1e-10));
    CHECK(f(0.08) > f(0.08 + 1e-4));
    CHECK(f(0.08) > f(0.08 - 1e-4));
    CHECK_THROWS_AS(gaussian_green(0.0, 0.0, 0.1, 0.2), DomainError);
    CHECK_THROWS_AS(gaussian_green(0.0, 1.0, 0.1, 0.0), DomainError);
}

TEST_CASE("gaussian_green is a propagator") {
    const double dt = 0.5, r = 0.05, s = 0.3;
    for (double x : {-0.3, 0.0, 0.25}) {
        auto conv = [&](double y) { return gaussian_green(y, dt / 2, r, s) * gaussian_green(x - y, dt / 2, r, s); };
        const double c = oracle::finite(conv, -4.0, 4.0);
        CHECK(c == doctest::Approx(gaussian_green(x, dt, r, s)).epsilon(1e-8));
    }
}

TEST_CASE("bs_price limits and quadrature") {
    PricingContext ctx{100.0, 0.05, 0.05, 1.0, 1.0 / 64};
    CHECK(bs_price(ctx, {1e-8}, 90.0, OptionKind::Call) == doctest::Approx(100.0 - 90.0 * std::exp(-0.05)).epsilon(1e-10));
    CHECK(bs_price(ctx, {1e-8}, 90.0, OptionKind::Call) == doctest::Approx(14.389).epsilon(1e-4));
    PricingContext atm{100.0, 0.0, 0.0, 1.0, 1.0 / 64};
    // Independent oracle: integrate the payoff against the normal density.
    auto payoff = [&](double x) { return (100.0 * std::exp(x) - 100.0) * gaussian_green(x, 1.0, 0.0, 0.2); };
    const double q = oracle::upper(payoff, 0.0);
    CHECK(bs_price(atm, {0.2}, 100.0, OptionKind::Call) == doctest::Approx(q).epsilon(1e-10));
    CHECK(bs_price(atm, {0.2}, 100.0, OptionKind::Call) == doctest::Approx(0.3989 * 0.2 * 100).epsilon(0.01));
    CHECK_THROWS_AS(bs_price(ctx, {0.2}, 0.0, OptionKind::Call), DomainError);
}

TEST_CASE("bs_price closed form vs quadrature grid") {
    for (double m : {0.8, 0.9, 1.0, 1.1, 1.25}) {
        for (double s : {0.05, 0.2, 0.6, 1.0, 1.5}) {
            for (double dt : {0.02, 0.1, 0.5, 1.0, 3.0}) {
                PricingContext ctx{100.0, 0.04, 0.04, dt, 1.0 / 64};
                for (auto k : {OptionKind::Call, OptionKind::Put}) {
                    const double a = bs_price(ctx, {s}, 100.0 * m, k);
                    const double b = bs_price_quadrature(ctx, {s}, 100.0 * m, k);
                    CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, a));
                }
            }
        }
    }
}

TEST_CASE("put-call parity, monotonicity and convexity") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        PricingContext ctx{50 + 100 * u(rng), 0.1 * u(rng), 0.0, 0.05 + 2 * u(rng), 1.0 / 64};
        ctx.carry_rate = ctx.discount_rate;
        const double k = ctx.p0 * (0.7 + 0.6 * u(rng));
        const GaussParams g{0.05 + 0.5 * u(rng)};
        const double c = bs_price(ctx, g, k, OptionKind::Call);
        const double p = bs_price(ctx, g, k, OptionKind::Put);
        CHECK(c - p == doctest::Approx(ctx.p0 - k * std::exp(-ctx.discount_rate * ctx.dt)).epsilon(1e-10));
    }
    PricingContext ctx{100.0, 0.03, 0.03, 0.5, 1.0 / 64};
    double prev_c = 1e9, prev_p = -1.0;
    for (double k = 70.0; k <= 130.0; k += 2.0) {
        const double c = bs_price(ctx, {0.25}, k, OptionKind::Call);
        const double p = bs_price(ctx, {0.25}, k, OptionKind::Put);
        CHECK(c < prev_c);
        CHECK(p > prev_p);
        const double c2 = bs_price(ctx, {0.25}, k + 2.0, OptionKind::Call);
        const double c0 = bs_price(ctx, {0.25}, k - 2.0, OptionKind::Call);
        CHECK(c0 + c2 - 2.0 * c >= -1e-12);
        prev_c = c;
        prev_p = p;
    }
}

TEST_CASE("implied_vol roundtrip, table quote and bounds") {
    PricingContext ctx{89.92, 0.09, 0.0, 107.0 / 365.0, 1.0 / 64};
    for (double s : {0.02, 0.104, 0.3, 1.2}) {
        for (double k : {80.0, 89.92, 100.0}) {
            for (auto kind : {OptionKind::Call, OptionKind::Put}) {
                const double p = bs_price(ctx, {s}, k, kind);
                // No time value left: the volatility is not identifiable.
                if (p - price_bounds(ctx, k, kind).first < 1e-6) continue;
                CHECK(implied_vol(ctx, k, kind, p) == doctest::Approx(s).epsilon(1e-8));
            }
        }
    }
    CHECK(implied_vol(ctx, 86.0, OptionKind::Put, 0.594) == doctest::Approx(0.104).epsilon(0.01));
    CHECK_THROWS_AS(implied_vol(ctx, 90.0, OptionKind::Call, ctx.p0 + 1.0), DomainError);
    CHECK_THROWS_AS(implied_vol(ctx, 90.0, OptionKind::Put, -0.1), DomainError);
}

TEST_CASE("bs_pde_residual") {
    PricingContext ctx{100.0, 0.05, 0.05, 1.0, 1.0 / 64};
    const GaussParams g{0.2};
    const double big_t = 1.0, k = 95.0;
    Surface u = [&](double x, double t) {
        PricingContext c = ctx;
        c.p0 = 100.0 * std::exp(x);
        c.dt = big_t - t;
        return bs_price(c, g, k, OptionKind::Call);
    };
    for (double x : {-0.2, 0.2}) {
        for (double t : {0.2, 0.5}) {
            const double r = bs_pde_residual(u, ctx, g, x, t);
            CHECK(std::abs(r) <= 1e-4 * ctx.discount_rate * u(x, t));
        }
    }
    Surface under = [](double x, double) { return 100.0 * std::exp(x); };
    CHECK(std::abs(bs_pde_residual(under, ctx, g, 0.1, 0.3)) <= 1e-5);
    Surface one = [](double, double) { return 1.0; };
    CHECK(bs_pde_residual(one, ctx, g, 0.0, 0.5) == doctest::Approx(0.05).epsilon(1e-9));
}
