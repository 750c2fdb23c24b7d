#include "expopt/exponential_pricing.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "expopt/errors.hpp"
#include "expopt/numerics.hpp"

namespace expopt {

void ExpPriceInputs::validate() const {
    ctx.validate();
    params.validate();
    require(strike > 0.0, "strike K must be positive");
    require(params.nu > 1.0,
            "nu must exceed 1: the pricing integrals diverge for nu <= 1 (got nu = " +
                std::to_string(params.nu) + ")");
}

double ExpPriceInputs::log_moneyness() const { return std::log(strike / ctx.p0); }

double exp_mean_price_ratio(const ExpParams& p) {
    require(p.nu > 1.0, "nu must exceed 1: the mean price ratio diverges");
    return std::exp(p.delta) * p.gamma * p.nu / ((p.gamma + 1.0) * (p.nu - 1.0));
}

namespace {

// Undiscounted out-of-the-money pieces, in log form so huge exponents stay finite.
double otm_put(const ExpPriceInputs& in) {
    const auto& p = in.params;
    const double xk = in.log_moneyness();
    return in.strike * p.normalization() / (p.gamma * (p.gamma + 1.0)) *
           std::exp(p.gamma * (xk - p.delta));
}

double otm_call(const ExpPriceInputs& in) {
    const auto& p = in.params;
    const double xk = in.log_moneyness();
    return in.strike * p.normalization() / (p.nu * (p.nu - 1.0)) * std::exp(-p.nu * (xk - p.delta));
}

}  // namespace

double exp_price_closed(const ExpPriceInputs& in, OptionKind kind) {
    in.validate();
    const double xk = in.log_moneyness();
    const double mean_price = in.ctx.p0 * exp_mean_price_ratio(in.params);
    double value = 0.0;
    if (kind == OptionKind::Call) {
        value = xk < in.params.delta ? mean_price - in.strike + otm_put(in) : otm_call(in);
    } else {
        value = xk < in.params.delta ? otm_put(in) : in.strike - mean_price + otm_call(in);
    }
    return in.ctx.discount() * std::max(value, 0.0);
}

double exp_call_itm_as_printed(const ExpPriceInputs& in) {
    in.validate();
    const auto& p = in.params;
    return in.ctx.discount() *
           (in.ctx.p0 * std::exp(p.delta) * p.normalization() - in.strike + otm_put(in));
}

double exp_price_quadrature(const ExpPriceInputs& in, OptionKind kind) {
    in.validate();
    const auto& p = in.params;
    const double xk = in.log_moneyness();
    const double p0 = in.ctx.p0;
    const double k = in.strike;
    auto integrand = [&](double x) {
        const double payoff = kind == OptionKind::Call ? p0 * std::exp(x) - k : k - p0 * std::exp(x);
        return payoff * exp_density(x, p);
    };
    // The call integrand decays like e^{-(nu-1)x}, the put like e^{gamma x};
    // 40 e-folds puts the cut below 1e-16 of the peak.
    numerics::QuadratureOptions opts{.abs_tol = 0.0, .rel_tol = 1e-13};
    double value = 0.0;
    if (kind == OptionKind::Call) {
        const double hi = std::max(xk, p.delta) + 40.0 / (p.nu - 1.0);
        const std::array<double, 3> pts{xk, std::max(xk, p.delta), hi};
        value = numerics::integrate_pieces(integrand, pts, opts).value;
    } else {
        const double lo = std::min(xk, p.delta) - 40.0 / p.gamma;
        const std::array<double, 3> pts{lo, std::min(xk, p.delta), xk};
        value = numerics::integrate_pieces(integrand, pts, opts).value;
    }
    return in.ctx.discount() * value;
}

double expiry_limit_check(const PricingContext& ctx, double strike, OptionKind kind, double scale) {
    require(scale >= 1.0, "expiry_limit_check: scale must be >= 1");
    ExpPriceInputs in{ctx, {10.0 * scale, 15.0 * scale, 0.0}, strike};
    in.ctx.carry_rate = 0.0;
    in.params.delta = delta_from_carry(0.0, ctx.dt, in.params.gamma, in.params.nu);
    const double price = exp_price_closed(in, kind);
    const double payoff = kind == OptionKind::Call ? ctx.p0 - strike : strike - ctx.p0;
    return std::abs(price - ctx.discount() * std::max(payoff, 0.0));
}

}  // namespace expopt
