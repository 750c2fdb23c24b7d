#pragma once

// Stretched-exponential returns, interpolating from exponential (alpha = 1)
// to Gaussian-shaped (alpha = 2) branches:
//
//   P(x) = A exp(-(nu (x - delta))^alpha)      x > delta
//   P(x) = A exp(-(gamma (delta - x))^alpha)   x < delta
//
// with A = alpha gamma nu / ((gamma + nu) Gamma(1/alpha)). Under
// z = (nu (x - delta))^alpha one has dx = z^{1/alpha - 1} dz / (alpha nu),
// so each branch is a Gamma(1/alpha) law in z.

#include "expopt/pricing_context.hpp"

namespace expopt {

enum class Side { Plus, Minus };

struct StretchedParams {
    double alpha = 1.0;
    double gamma = 1.0;
    double nu = 1.0;
    double delta = 0.0;

    void validate() const;
    double normalization() const;
};

double stretched_density(double x, const StretchedParams& p);

/// Conditional <z^n> on one side, z = (rate |x - delta|)^alpha:
/// Gamma(n + 1/alpha) / Gamma(1/alpha).
double stretched_moment(int n, const StretchedParams& p, Side side);

/// Conditional mean of x on one side: delta +- Gamma(2/alpha) / (rate Gamma(1/alpha)).
double stretched_side_mean(const StretchedParams& p, Side side);

/// Discounted payoff integrated against the density in x.
double stretched_price_quadrature(const PricingContext& ctx, const StretchedParams& p,
                                  double strike, OptionKind kind);

/// Call with x_K > delta through the z-substitution: the strike term is an
/// upper incomplete gamma, the price term a z-quadrature.
double stretched_call_incomplete_gamma(const PricingContext& ctx, const StretchedParams& p,
                                       double strike);

}  // namespace expopt
