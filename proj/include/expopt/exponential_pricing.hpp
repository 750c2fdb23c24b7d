#pragma once

// European options priced against the two-sided exponential return density.
//
// The closed forms integrate the payoff over the two exponential branches;
// with x_K = ln(K/p0) and A = gamma nu / (gamma + nu):
//
//   put,  x_K <  delta :  K A e^{-gamma delta} (K/p0)^gamma / (gamma (gamma+1))
//   call, x_K >= delta :  K A e^{ nu delta}   (K/p0)^-nu    / (nu (nu-1))
//
// and the other two branches follow from E[p0 e^x] = p0 e^delta gamma nu /
// ((gamma+1)(nu-1)). Everything is discounted by e^{-R dt}.

#include "expopt/pricing_context.hpp"
#include "expopt/returns_distributions.hpp"

namespace expopt {

struct ExpPriceInputs {
    PricingContext ctx;
    ExpParams params;
    double strike = 100.0;

    /// Throws DomainError on K <= 0, invalid params, or nu <= 1.
    void validate() const;
    double log_moneyness() const;
};

double exp_price_closed(const ExpPriceInputs& in, OptionKind kind);

/// Ground truth: adaptive quadrature of the discounted payoff against
/// exp_density.
double exp_price_quadrature(const ExpPriceInputs& in, OptionKind kind);

/// The call formula for x_K < delta exactly as printed in the source
/// (first term p0 e^delta gamma nu / (gamma + nu)). Kept only so the
/// discrepancy against the integral can be reported.
double exp_call_itm_as_printed(const ExpPriceInputs& in);

/// Mean terminal price ratio E[e^x] under the density.
double exp_mean_price_ratio(const ExpParams& p);

/// Prices with (gamma, nu) = scale * (10, 15), delta from the carry relation
/// with c = 0, and returns |price - e^{-R dt} max(+-(p0 - K), 0)|.
double expiry_limit_check(const PricingContext& ctx, double strike, OptionKind kind, double scale);

}  // namespace expopt
