#include "expopt/stretched_pricing.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "expopt/errors.hpp"
#include "expopt/numerics.hpp"

namespace expopt {

void StretchedParams::validate() const {
    require(alpha >= 1.0 && alpha <= 2.0, "alpha must lie in [1, 2]");
    require(gamma > 0.0 && nu > 0.0, "gamma and nu must be positive");
    require(std::isfinite(delta), "delta must be finite");
}

double StretchedParams::normalization() const {
    return alpha * gamma * nu / ((gamma + nu) * std::tgamma(1.0 / alpha));
}

double stretched_density(double x, const StretchedParams& p) {
    p.validate();
    const double a = p.normalization();
    if (x > p.delta) return a * std::exp(-std::pow(p.nu * (x - p.delta), p.alpha));
    return a * std::exp(-std::pow(p.gamma * (p.delta - x), p.alpha));
}

double stretched_moment(int n, const StretchedParams& p, Side /*side*/) {
    p.validate();
    require(n >= 0, "moment order must be non-negative");
    const double s = 1.0 / p.alpha;
    return std::exp(std::lgamma(n + s) - std::lgamma(s));
}

double stretched_side_mean(const StretchedParams& p, Side side) {
    p.validate();
    const double ratio = std::exp(std::lgamma(2.0 / p.alpha) - std::lgamma(1.0 / p.alpha));
    return side == Side::Plus ? p.delta + ratio / p.nu : p.delta - ratio / p.gamma;
}

namespace {

void require_convergent(const StretchedParams& p, OptionKind kind) {
    // Only the call's upper tail carries the e^x growth.
    if (kind == OptionKind::Call && p.alpha == 1.0) {
        require(p.nu > 1.0, "nu must exceed 1 at alpha = 1: the call integral diverges");
    }
}

// Distance from delta beyond which a branch is below e^{-40} of its peak,
// after allowing for the e^x tilt on the upper side.
double tail_reach(double rate, double alpha, bool tilted) {
    double r = std::pow(40.0, 1.0 / alpha) / rate;
    if (tilted) {
        // Solve (rate r)^alpha - r >= 40 by fixed-point growth.
        for (int i = 0; i < 200 && std::pow(rate * r, alpha) - r < 40.0; ++i) r *= 1.25;
    }
    return r;
}

}  // namespace

double stretched_price_quadrature(const PricingContext& ctx, const StretchedParams& p,
                                  double strike, OptionKind kind) {
    ctx.validate();
    p.validate();
    require(strike > 0.0, "strike K must be positive");
    require_convergent(p, kind);
    const double xk = std::log(strike / ctx.p0);
    const double a = p.normalization();
    auto integrand = [&](double x) {
        const double payoff = kind == OptionKind::Call ? ctx.p0 * std::exp(x) - strike
                                                       : strike - ctx.p0 * std::exp(x);
        const double dens = x > p.delta ? std::exp(-std::pow(p.nu * (x - p.delta), p.alpha))
                                        : std::exp(-std::pow(p.gamma * (p.delta - x), p.alpha));
        return a * payoff * dens;
    };
    numerics::QuadratureOptions opts{.abs_tol = 0.0, .rel_tol = 1e-13};
    double value = 0.0;
    if (kind == OptionKind::Call) {
        const double start = std::max(xk, p.delta);
        const double hi = start + tail_reach(p.nu, p.alpha, true);
        const double lead = std::max(xk, p.delta) == xk ? xk : p.delta;
        const std::array<double, 4> pts{xk, std::max(xk, p.delta),
                                        std::min(hi, lead + 1.0 / p.nu), hi};
        value = numerics::integrate_pieces(integrand, pts, opts).value;
    } else {
        const double end = std::min(xk, p.delta);
        const double lo = end - tail_reach(p.gamma, p.alpha, false);
        const std::array<double, 4> pts{lo, std::max(lo, end - 1.0 / p.gamma), end, xk};
        value = numerics::integrate_pieces(integrand, pts, opts).value;
    }
    return ctx.discount() * value;
}

double stretched_call_incomplete_gamma(const PricingContext& ctx, const StretchedParams& p,
                                       double strike) {
    ctx.validate();
    p.validate();
    require(strike > 0.0, "strike K must be positive");
    require_convergent(p, OptionKind::Call);
    const double xk = std::log(strike / ctx.p0);
    require(xk > p.delta, "incomplete-gamma call form needs x_K > delta");
    const double s = 1.0 / p.alpha;
    const double zk = std::pow(p.nu * (xk - p.delta), p.alpha);
    // p0 e^delta * int_{zK}^inf exp(z^{1/alpha}/nu - z) z^{1/alpha - 1} dz
    auto growth = [&](double z) {
        return std::exp(std::pow(z, s) / p.nu - z + (s - 1.0) * std::log(z));
    };
    double zhi = zk + 40.0;
    while (std::pow(zhi, s) / p.nu - zhi + (s - 1.0) * std::log(zhi) >
           std::pow(zk, s) / p.nu - zk + (s - 1.0) * std::log(zk) - 40.0) {
        zhi = zk + 2.0 * (zhi - zk);
    }
    numerics::QuadratureOptions opts{.abs_tol = 0.0, .rel_tol = 1e-13};
    const std::array<double, 3> pts{zk, zk + 1.0, zhi};
    const double price_term =
        ctx.p0 * std::exp(p.delta) * numerics::integrate_pieces(growth, pts, opts).value;
    const double strike_term = strike * numerics::upper_incomplete_gamma(s, zk);
    return ctx.discount() * p.normalization() / (p.alpha * p.nu) * (price_term - strike_term);
}

}  // namespace expopt
