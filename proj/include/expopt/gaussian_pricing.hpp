#pragma once

// Black-Scholes in the log-return variable. The Green function is the normal
// density N((mu - sigma^2/2) dt, sigma^2 dt); the underlying grows at the
// context's carry rate and payoffs are discounted at its discount rate.

#include <functional>

#include "expopt/pricing_context.hpp"

namespace expopt {

struct GaussParams {
    double sigma = 0.2;  // per sqrt-year
};

double gaussian_green(double x, double dt, double rate, double sigma);

/// Closed-form European price (Black-76 form on the forward p0 e^{c dt}).
double bs_price(const PricingContext& ctx, const GaussParams& g, double strike, OptionKind kind);

/// The same price by direct quadrature of the payoff against gaussian_green.
double bs_price_quadrature(const PricingContext& ctx, const GaussParams& g, double strike,
                           OptionKind kind);

/// Arbitrage bounds (lower, upper) on a European price under `ctx`.
std::pair<double, double> price_bounds(const PricingContext& ctx, double strike, OptionKind kind);

/// Bisection on [1e-6, 5] followed by Newton polish. Throws DomainError when
/// the price is outside the arbitrage bounds, NumericalError when 200
/// iterations do not reach 1e-10 in price.
double implied_vol(const PricingContext& ctx, double strike, OptionKind kind, double market_price);

/// u(x, t): option value as a function of log-return and calendar time.
using Surface = std::function<double(double x, double t)>;

/// R u - u_t - (c - sigma^2/2) u' - (sigma^2/2) u'' by central differences
/// (h = 1e-4 in x, 1e-5 in t). With c = R this is the returns-form
/// Black-Scholes operator.
double bs_pde_residual(const Surface& u, const PricingContext& ctx, const GaussParams& g, double x,
                       double t);

}  // namespace expopt
