#include "expopt/gaussian_pricing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "expopt/errors.hpp"
#include "expopt/numerics.hpp"

namespace expopt {

void PricingContext::validate() const {
    require(p0 > 0.0, "underlying price p0 must be positive");
    require(dt > 0.0, "time to expiry dt must be positive");
    require(tic > 0.0, "tic size must be positive");
    require(std::isfinite(discount_rate) && std::isfinite(carry_rate), "rates must be finite");
}

double PricingContext::forward() const { return p0 * std::exp(carry_rate * dt); }
double PricingContext::discount() const { return std::exp(-discount_rate * dt); }

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double black_price(double forward, double strike, double stdev, double discount, OptionKind kind) {
    const double d1 = (std::log(forward / strike) + 0.5 * stdev * stdev) / stdev;
    const double d2 = d1 - stdev;
    if (kind == OptionKind::Call) return discount * (forward * norm_cdf(d1) - strike * norm_cdf(d2));
    return discount * (strike * norm_cdf(-d2) - forward * norm_cdf(-d1));
}

double black_vega(double forward, double strike, double stdev, double discount, double dt) {
    const double d1 = (std::log(forward / strike) + 0.5 * stdev * stdev) / stdev;
    return discount * forward * std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * std::numbers::pi) *
           std::sqrt(dt);
}

}  // namespace

double gaussian_green(double x, double dt, double rate, double sigma) {
    require(dt > 0.0, "gaussian_green: dt must be positive");
    require(sigma > 0.0, "gaussian_green: sigma must be positive");
    const double var = sigma * sigma * dt;
    const double mean = (rate - 0.5 * sigma * sigma) * dt;
    return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

double bs_price(const PricingContext& ctx, const GaussParams& g, double strike, OptionKind kind) {
    ctx.validate();
    require(strike > 0.0, "strike K must be positive");
    require(g.sigma > 0.0, "sigma must be positive");
    return black_price(ctx.forward(), strike, g.sigma * std::sqrt(ctx.dt), ctx.discount(), kind);
}

double bs_price_quadrature(const PricingContext& ctx, const GaussParams& g, double strike,
                           OptionKind kind) {
    ctx.validate();
    require(strike > 0.0, "strike K must be positive");
    const double xk = std::log(strike / ctx.p0);
    const double sd = g.sigma * std::sqrt(ctx.dt);
    const double mean = (ctx.carry_rate - 0.5 * g.sigma * g.sigma) * ctx.dt;
    // 40 standard deviations (plus the e^x tilt for calls) leaves < 1e-16 of the peak.
    const double reach = 40.0 * sd + sd * sd;
    auto payoff = [&](double x) {
        const double p = ctx.p0 * std::exp(x);
        const double v = kind == OptionKind::Call ? p - strike : strike - p;
        return v * gaussian_green(x, ctx.dt, ctx.carry_rate, g.sigma);
    };
    numerics::QuadratureOptions opts{.abs_tol = 0.0, .rel_tol = 1e-13};
    std::array<double, 4> pts{};
    if (kind == OptionKind::Call) {
        const double hi = std::max(xk, mean) + reach;
        pts = {xk, std::clamp(mean, xk, hi), std::clamp(mean + sd * sd, xk, hi), hi};
    } else {
        const double lo = std::min(xk, mean) - reach;
        pts = {lo, std::clamp(mean - sd, lo, xk), std::clamp(mean, lo, xk), xk};
    }
    return ctx.discount() * numerics::integrate_pieces(payoff, pts, opts).value;
}

std::pair<double, double> price_bounds(const PricingContext& ctx, double strike, OptionKind kind) {
    const double df = ctx.discount();
    const double fwd = ctx.forward();
    if (kind == OptionKind::Call) return {df * std::max(fwd - strike, 0.0), df * fwd};
    return {df * std::max(strike - fwd, 0.0), df * strike};
}

double implied_vol(const PricingContext& ctx, double strike, OptionKind kind, double market_price) {
    ctx.validate();
    require(strike > 0.0, "strike K must be positive");
    constexpr double lo_sigma = 1e-6;
    constexpr double hi_sigma = 5.0;
    constexpr double price_tol = 1e-10;
    const auto [lower, upper] = price_bounds(ctx, strike, kind);
    require(market_price > lower && market_price < upper,
            "no implied volatility: price outside the arbitrage bounds");

    const double fwd = ctx.forward();
    const double df = ctx.discount();
    const double sqdt = std::sqrt(ctx.dt);
    auto f = [&](double s) { return black_price(fwd, strike, s * sqdt, df, kind) - market_price; };

    double a = lo_sigma;
    double b = hi_sigma;
    double fa = f(a);
    double fb = f(b);
    if (fa > 0.0 || fb < 0.0) {
        throw DomainError("no implied volatility in [1e-6, 5] for this price");
    }
    double s = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        const double fs = f(s);
        if (std::abs(fs) <= price_tol) return s;
        if (fs < 0.0) a = s;
        else b = s;
        // Newton once the bracket is tight enough for the step to stay inside it.
        const double vega = black_vega(fwd, strike, s * sqdt, df, ctx.dt);
        double next = vega > 0.0 ? s - fs / vega : 0.5 * (a + b);
        if (!(next > a && next < b) || b - a > 0.5) next = 0.5 * (a + b);
        s = next;
    }
    if (std::abs(f(s)) <= price_tol) return s;
    throw NumericalError("implied_vol: no convergence in 200 iterations");
}

double bs_pde_residual(const Surface& u, const PricingContext& ctx, const GaussParams& g, double x,
                       double t) {
    constexpr double hx = 1e-4;
    constexpr double ht = 1e-5;
    const double s2 = g.sigma * g.sigma;
    const double u0 = u(x, t);
    const double up = u(x + hx, t);
    const double um = u(x - hx, t);
    const double ut = (u(x, t + ht) - u(x, t - ht)) / (2.0 * ht);
    const double ux = (up - um) / (2.0 * hx);
    const double uxx = (up - 2.0 * u0 + um) / (hx * hx);
    if (!std::isfinite(u0 + up + um + ut)) throw NumericalError("bs_pde_residual: sampler failure");
    return ctx.discount_rate * u0 - ut - (ctx.carry_rate - 0.5 * s2) * ux - 0.5 * s2 * uxx;
}

}  // namespace expopt
