#include <doctest.h>

#include <cmath>
#include <random>

#include "expopt/errors.hpp"
#include "expopt/exponential_pricing.hpp"
#include "oracles.hpp"

using namespace expopt;

namespace {

ExpPriceInputs make(double p0, double k, double g, double n, double c, double r, double dt) {
    ExpPriceInputs in;
    in.ctx = {p0, r, c, dt, 1.0 / 64};
    in.params = {g, n, delta_from_carry(c, dt, g, n)};
    in.strike = k;
    return in;
}

// Independent oracle: Boost quadrature of the discounted payoff against the density.
double oracle_price(const ExpPriceInputs& in, OptionKind kind) {
    const double xk = std::log(in.strike / in.ctx.p0);
    const auto& p = in.params;
    auto dens = [&](double x) {
        const double a = p.gamma * p.nu / (p.gamma + p.nu);
        return x < p.delta ? a * std::exp(p.gamma * (x - p.delta)) : a * std::exp(-p.nu * (x - p.delta));
    };
    double v = 0.0;
    if (kind == OptionKind::Call) {
        auto f = [&](double x) { return (in.ctx.p0 * std::exp(x) - in.strike) * dens(x); };
        v = xk < p.delta ? oracle::finite(f, xk, p.delta) + oracle::upper(f, p.delta) : oracle::upper(f, xk);
    } else {
        auto f = [&](double x) { return (in.strike - in.ctx.p0 * std::exp(x)) * dens(x); };
        v = xk > p.delta ? oracle::finite(f, p.delta, xk) + oracle::lower(f, p.delta) : oracle::lower(f, xk);
    }
    return std::exp(-in.ctx.discount_rate * in.ctx.dt) * v;
}

}  // namespace

TEST_CASE("closed form matches the independent quadrature on the full grid") {
    for (double g : {5.0, 10.96, 50.0}) {
        for (double n : {5.0, 16.76, 50.0}) {
            for (double m : {0.8, 0.95, 1.0, 1.05, 1.2}) {
                for (double dt : {0.1, 0.3}) {
                    for (double c : {0.0, 0.05}) {
                        for (auto kind : {OptionKind::Call, OptionKind::Put}) {
                            const auto in = make(100.0, 100.0 * m, g, n, c, 0.05, dt);
                            const double a = exp_price_closed(in, kind);
                            const double q = oracle_price(in, kind);
                            const double lib = exp_price_quadrature(in, kind);
                            CHECK(std::abs(a - q) <= 1e-8 * std::max(q, 1e-6));
                            CHECK(std::abs(lib - q) <= 1e-8 * std::max(q, 1e-6));
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("worked example against the quadrature oracle") {
    const auto in = make(100.0, 100.0, 10.0, 15.0, 0.05, 0.05, 0.25);
    for (auto kind : {OptionKind::Call, OptionKind::Put})
        CHECK(oracle::rel(exp_price_closed(in, kind), oracle_price(in, kind)) <= 1e-8);
}

TEST_CASE("the printed in-the-money call form disagrees with the integral") {
    auto in = make(100.0, 90.0, 10.0, 15.0, 0.0, 0.0, 1.0);
    REQUIRE(in.log_moneyness() < in.params.delta);
    const double printed = exp_call_itm_as_printed(in);
    const double truth = oracle_price(in, OptionKind::Call);
    CHECK(std::abs(printed - truth) > 1e-3);
    CHECK(exp_price_closed(in, OptionKind::Call) == doctest::Approx(truth).epsilon(1e-10));
}

TEST_CASE("strike-time limit") {
    const auto in = make(100.0, 90.0, 1e6, 1e6, 0.0, 0.0, 1.0);
    CHECK(exp_price_closed(in, OptionKind::Call) == doctest::Approx(10.0).epsilon(1e-4));
    PricingContext ctx{100.0, 0.0, 0.0, 1.0, 1.0 / 64};
    CHECK(expiry_limit_check(ctx, 90.0, OptionKind::Call, 1e5) <= 1e-3);
    CHECK(expiry_limit_check(ctx, 110.0, OptionKind::Call, 1e5) <= 1e-3);
    const double d2 = expiry_limit_check(ctx, 100.0, OptionKind::Call, 1e2);
    const double d3 = expiry_limit_check(ctx, 100.0, OptionKind::Call, 1e3);
    const double d4 = expiry_limit_check(ctx, 100.0, OptionKind::Call, 1e4);
    CHECK(d3 < d2);
    CHECK(d4 < d3);
    CHECK(d2 / d3 == doctest::Approx(10.0).epsilon(0.1));
    CHECK(d3 / d4 == doctest::Approx(10.0).epsilon(0.1));
}

TEST_CASE("deep out-of and in-the-money limits") {
    auto in = make(100.0, 100.0, 10.0, 15.0, 0.03, 0.04, 0.5);
    in.strike = in.ctx.p0 * std::exp(in.params.delta + 50.0 / in.params.nu);
    CHECK(exp_price_quadrature(in, OptionKind::Call) <= 1e-12 * in.ctx.p0);
    in.strike = in.ctx.p0 * std::exp(in.params.delta - 50.0 / in.params.gamma);
    CHECK(exp_price_quadrature(in, OptionKind::Put) <= 1e-12 * in.ctx.p0);
    const double fwd = in.ctx.discount() * (in.ctx.forward() - in.strike);
    CHECK(exp_price_quadrature(in, OptionKind::Call) == doctest::Approx(fwd).epsilon(1e-9));
}

TEST_CASE("put-call parity with carry-consistent delta") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const auto in = make(50 + 100 * u(rng), 0, 2 + 60 * u(rng), 1.5 + 60 * u(rng), -0.05 + 0.15 * u(rng),
                             0.12 * u(rng), 0.02 + 2 * u(rng));
        auto x = in;
        x.strike = in.ctx.p0 * (0.7 + 0.6 * u(rng));
        const double c = exp_price_closed(x, OptionKind::Call);
        const double p = exp_price_closed(x, OptionKind::Put);
        const double rhs = x.ctx.discount() * (x.ctx.forward() - x.strike);
        CHECK(std::abs(c - p - rhs) <= 1e-9 * x.ctx.p0);
    }
}

TEST_CASE("monotone, convex and bounded in strike") {
    double prev_c = 1e9, prev_p = -1;
    for (double k = 70.0; k <= 130.0; k += 1.0) {
        const auto in = make(100.0, k, 10.96, 16.76, 0.02, 0.05, 0.3);
        auto lo = in, hi = in;
        lo.strike -= 1.0;
        hi.strike += 1.0;
        const double c = exp_price_closed(in, OptionKind::Call);
        const double p = exp_price_closed(in, OptionKind::Put);
        CHECK(c < prev_c);
        CHECK(p > prev_p);
        CHECK(exp_price_closed(lo, OptionKind::Call) + exp_price_closed(hi, OptionKind::Call) - 2 * c >= -1e-12);
        CHECK(exp_price_closed(lo, OptionKind::Put) + exp_price_closed(hi, OptionKind::Put) - 2 * p >= -1e-12);
        CHECK(c >= 0.0);
        CHECK(p >= 0.0);
        CHECK(c <= in.ctx.discount() * in.ctx.forward());
        CHECK(p <= in.ctx.discount() * k);
        prev_c = c;
        prev_p = p;
    }
}

TEST_CASE("divergence and invalid input") {
    auto in = make(100.0, 100.0, 10.0, 15.0, 0.0, 0.0, 1.0);
    in.params.nu = 0.9;
    CHECK_THROWS_WITH_AS(exp_price_closed(in, OptionKind::Call), doctest::Contains("diverge"), DomainError);
    in.params.nu = 1.0;
    CHECK_THROWS_AS(exp_price_quadrature(in, OptionKind::Put), DomainError);
    in.params.nu = 15.0;
    in.strike = 0.0;
    CHECK_THROWS_AS(exp_price_closed(in, OptionKind::Call), DomainError);
}

TEST_CASE("mean price ratio equals the carry growth") {
    const double d = delta_from_carry(0.04, 0.5, 10.0, 15.0);
    CHECK(exp_mean_price_ratio({10.0, 15.0, d}) == doctest::Approx(std::exp(0.02)).epsilon(1e-14));
}
