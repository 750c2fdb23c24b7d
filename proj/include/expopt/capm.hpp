#pragma once

// Mean-variance (CAPM) portfolio algebra and the comparison between the
// CAPM and delta-hedge routes to an option pricing equation.

#include <functional>
#include <utility>

#include <Eigen/Dense>

#include "expopt/gaussian_pricing.hpp"
#include "expopt/pricing_context.hpp"

namespace expopt {

struct CapmInputs {
    Eigen::MatrixXd sigma;           // covariance of excess returns
    Eigen::VectorXd excess_returns;  // R_i - R_0
    double r0 = 0.0;

    void validate() const;
};

/// Solves sigma f = excess_returns and rescales so sum(f) = 1: the efficient
/// (tangency) portfolio. Throws DomainError if sigma is not SPD.
Eigen::VectorXd efficient_weights(const CapmInputs& in);

/// Portfolio variance f' sigma f.
double portfolio_variance(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& f);

/// f1/f2 = (s12 dR2 - s22 dR1) / (s12 dR1 - s11 dR2).
double two_asset_ratio(double sigma11, double sigma12, double sigma22, double dr1, double dr2);

double asset_beta(double sigma_ke, double sigma_ee);
double capm_return(double beta, double dre, double r0);

/// Fourth-moment factor <(eps^2 - 1)^2> for the unit-variance noise law.
enum class NoiseLaw { Gaussian, TwoSidedExponential };
double excess_kurtosis_factor(NoiseLaw law);
double fourth_moment(NoiseLaw law);

struct HedgeState {
    double p = 100.0;
    double w = 1.0;             // option price
    double elasticity = 1.0;    // p w' / w
    double beta1 = 1.0;
    double beta2 = 1.0;
    double delta_re = 0.0;      // excess return of the efficient portfolio
    double sigma1 = 0.2;
    double w_second = 0.0;      // w''
    double dt = 1.0 / 252.0;
    NoiseLaw noise = NoiseLaw::Gaussian;

    void validate() const;
};

/// Fractions (f1, f2) invested in the underlying and the option, up to a
/// common positive factor Delta R_e / q where q is the option's excess
/// variance. With `leading_order` the correlation matrix is truncated at
/// leading order in dt and f1/f2 = -p w'/w exactly; otherwise f1 carries the
/// O(dt) term beta1 q / sigma11.
std::pair<double, double> capm_fractions(const HedgeState& h, bool leading_order = true);

struct HedgeStats {
    double excess_return = 0.0;
    double hedge_beta = 0.0;
    double residual_variance = 0.0;
    double approx_sigma22 = 0.0;
};

HedgeStats hedge_stats(const HedgeState& h);

/// w(p, t): option value as a function of the underlying price and time.
using PriceSurface = std::function<double(double p, double t)>;

struct PdeGap {
    double delta_hedge_residual = 0.0;  // R0 w - w_t - R0 p w' - sigma^2 p^2 w''/2
    double capm_residual = 0.0;         // R2 w - w_t - R1 p w' - sigma^2 p^2 w''/2
    double gap = 0.0;                   // capm - delta hedge = (R2-R0) w - (R1-R0) p w'
};

/// Evaluates both pricing pdes on one surface at (p, t) by central differences.
/// R0 is taken from ctx.discount_rate.
PdeGap pde_gap(const PricingContext& ctx, double r1, double r2, const GaussParams& g,
               const PriceSurface& w, double p, double t);

}  // namespace expopt
