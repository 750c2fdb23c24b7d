#include "expopt/capm.hpp"

#include <cmath>

#include "expopt/errors.hpp"

namespace expopt {

void CapmInputs::validate() const {
    require(sigma.rows() > 0 && sigma.rows() == sigma.cols(), "sigma must be a square matrix");
    require(excess_returns.size() == sigma.rows(), "excess return vector size must match sigma");
    require(sigma.isApprox(sigma.transpose(), 1e-12), "sigma must be symmetric");
}

Eigen::VectorXd efficient_weights(const CapmInputs& in) {
    in.validate();
    Eigen::LLT<Eigen::MatrixXd> llt(in.sigma);
    require(llt.info() == Eigen::Success, "sigma is singular or not positive definite");
    Eigen::VectorXd f = llt.solve(in.excess_returns);
    const double total = f.sum();
    require(std::abs(total) > 1e-14 * f.cwiseAbs().sum(),
            "efficient portfolio cannot be normalized: weights sum to zero");
    return f / total;
}

double portfolio_variance(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& f) {
    return f.dot(sigma * f);
}

double two_asset_ratio(double sigma11, double sigma12, double sigma22, double dr1, double dr2) {
    const double den = sigma12 * dr1 - sigma11 * dr2;
    if (den == 0.0) throw DomainError("two_asset_ratio: degenerate portfolio (zero denominator)");
    return (sigma12 * dr2 - sigma22 * dr1) / den;
}

double asset_beta(double sigma_ke, double sigma_ee) {
    require(sigma_ee > 0.0, "sigma_ee must be positive");
    return sigma_ke / sigma_ee;
}

double capm_return(double beta, double dre, double r0) { return r0 + beta * dre; }

double fourth_moment(NoiseLaw law) { return law == NoiseLaw::Gaussian ? 3.0 : 6.0; }

double excess_kurtosis_factor(NoiseLaw law) {
    // <(e^2 - 1)^2> = <e^4> - 2<e^2> + 1 for unit variance.
    return fourth_moment(law) - 1.0;
}

void HedgeState::validate() const {
    require(w > 0.0, "option price w must be positive");
    require(dt > 0.0, "dt must be positive");
    require(sigma1 > 0.0, "sigma1 must be positive");
}

std::pair<double, double> capm_fractions(const HedgeState& h, bool leading_order) {
    h.validate();
    const double r = h.elasticity;
    double f1 = (h.beta1 * r - h.beta2) * r;
    const double f2 = h.beta2 - h.beta1 * r;
    if (!leading_order) {
        // Exact 2x2 solve with sigma12 = r sigma11, sigma22 = r^2 sigma11 + q.
        const double sigma11 = h.sigma1 * h.sigma1 / h.dt;
        const double curv = h.w_second * h.sigma1 * h.sigma1 * h.p * h.p / (2.0 * h.w);
        const double q = curv * curv * excess_kurtosis_factor(h.noise);
        f1 += h.beta1 * q / sigma11;
    }
    return {f1, f2};
}

HedgeStats hedge_stats(const HedgeState& h) {
    h.validate();
    const double r = h.elasticity;
    if (r == 1.0) throw DomainError("degenerate hedge: p w'/w = 1");
    HedgeStats s;
    s.hedge_beta = (h.beta1 * r - h.beta2) / (r - 1.0);
    s.excess_return = s.hedge_beta * h.delta_re;
    const double half = h.sigma1 * h.sigma1 * h.p * h.p * h.w_second * h.dt / 2.0;
    s.residual_variance = half * half * excess_kurtosis_factor(h.noise);
    s.approx_sigma22 = r * r * h.sigma1 * h.sigma1 / h.dt;
    return s;
}

PdeGap pde_gap(const PricingContext& ctx, double r1, double r2, const GaussParams& g,
               const PriceSurface& w, double p, double t) {
    const double hp = 1e-4 * p;
    constexpr double ht = 1e-5;
    const double w0 = w(p, t);
    const double wp = w(p + hp, t);
    const double wm = w(p - hp, t);
    const double wt = (w(p, t + ht) - w(p, t - ht)) / (2.0 * ht);
    if (!std::isfinite(w0 + wp + wm + wt)) throw NumericalError("pde_gap: sampler failure");
    const double w1 = (wp - wm) / (2.0 * hp);
    const double w2 = (wp - 2.0 * w0 + wm) / (hp * hp);
    const double diffusion = 0.5 * g.sigma * g.sigma * p * p * w2;
    const double r0 = ctx.discount_rate;
    PdeGap out;
    out.delta_hedge_residual = r0 * w0 - wt - r0 * p * w1 - diffusion;
    out.capm_residual = r2 * w0 - wt - r1 * p * w1 - diffusion;
    out.gap = out.capm_residual - out.delta_hedge_residual;
    return out;
}

}  // namespace expopt
