#pragma once

// Singular-volatility dynamics of log-returns.
//
// The diffusion coefficient vanishes at the peak of the return density and
// grows with the distance from it,
//
//   D+(x) = b^2  (nu    (x - delta))^{2 - alpha}    x > delta
//   D-(x) = b'^2 (gamma (delta - x))^{2 - alpha}    x < delta
//
// alpha = 1 gives the exponential density with nu = 1/(b sqrt t) and
// gamma = 1/(b' sqrt t); alpha = 2 gives constant (Gaussian) diffusion.
// Sample paths, a conservative Fokker-Planck solver, and the dynamic option
// prices built on the same coefficients live here.

#include <cstdint>
#include <span>
#include <vector>

#include "expopt/stretched_pricing.hpp"
#include "expopt/exponential_pricing.hpp"
#include "expopt/pricing_context.hpp"

namespace expopt {

struct DynParams {
    double b = 1.0;        // right-side scale, per sqrt-year
    double b_prime = 1.0;  // left-side scale, per sqrt-year
    double r_plus = 0.0;   // mean return for x > delta
    double r_minus = 0.0;  // mean return for x < delta
    double r_hedge = 0.0;  // hedge (discount) rate R
    double alpha = 1.0;    // 1 = exponential, 2 = Gaussian

    void validate() const;
};

enum class NoiseKind { TwoSidedExponential, Gaussian };

struct PathEnsemble {
    double horizon = 0.0;
    std::vector<double> samples;
    int n_steps = 0;
    std::uint64_t seed = 0;
    NoiseKind noise = NoiseKind::TwoSidedExponential;
};

struct DensityGrid {
    std::vector<double> x;       // uniform spacing
    std::vector<double> values;  // density per log-return
    double time = 0.0;

    double spacing() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
    double mass() const;  // trapezoid rule
};

struct TailExponents {
    double gamma = 0.0;
    double nu = 0.0;
};

struct DeltaViews {
    double plus_view = 0.0;   // R+ dt - 1/nu
    double minus_view = 0.0;  // R- dt + 1/gamma
    /// (R+ - R-) dt - (1/gamma - 1/nu), as printed for the consistency condition.
    double consistency_defect = 0.0;
};

double singular_diffusion(double x, const DynParams& params, double gamma, double nu, double delta);

/// nu = 1/(b sqrt dt), gamma = 1/(b' sqrt dt). Units of b and dt must agree.
TailExponents predicted_exponents(double b, double b_prime, double dt);

DeltaViews delta_evolution(const DynParams& params, double dt, double gamma, double nu);

/// Diffusion coefficients at elapsed time t as used by the simulator and the
/// Fokker-Planck solver: each side is anchored at its own delta view, and the
/// side boundary sits where the alpha = 1 coefficients meet. When the views
/// coincide this is singular_diffusion with D = 0 at delta.
struct DiffusionFrame {
    double t = 0.0;
    double gamma = 0.0;
    double nu = 0.0;
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    double boundary = 0.0;

    static DiffusionFrame at(const DynParams& params, double t);
    bool plus_side(double x) const { return x > boundary; }
    double diffusion(double x, const DynParams& params) const;
    double drift(double x, const DynParams& params) const;
};

struct SimulationOptions {
    NoiseKind noise = NoiseKind::TwoSidedExponential;
    /// 0 = EXPOPT_THREADS if set, else hardware concurrency.
    unsigned threads = 0;
};

/// Euler stepping x <- x + R h + sqrt(D(x) h) eps with coefficients evaluated
/// at the end of each step. Path i draws from the substream seed ^ i, so the
/// ensemble does not depend on the thread count.
PathEnsemble simulate_returns(const DynParams& params, double dt_total, std::size_t n_paths,
                              int n_steps, std::uint64_t seed, const SimulationOptions& opts = {});

struct ExpFit {
    double gamma = 0.0;
    double nu = 0.0;
    double delta = 0.0;
    double loglik = 0.0;
};

/// Maximum-likelihood fit of the two-sided exponential. For fixed delta the
/// rates have the closed form rho = gamma/nu = sqrt(S+/S-) and
/// nu = n rho / (S+ (1 + rho)); delta is profiled exactly over the sorted
/// sample.
ExpFit fit_two_sided_exponential(std::span<const double> xs);

struct AverageVolatility {
    double analytic = 0.0;     // b^2 dt n(alpha) (or b'^2 ...); n(1) = n(2) = 1
    double monte_carlo = 0.0;
    double scaling_constant = 1.0;
};

/// <D> dt on one side with x drawn from the scaling-form density
/// exp(-(rate |x - delta|)^alpha) at the predicted exponents for dt.
AverageVolatility average_volatility_check(const DynParams& params, double dt, Side side,
                                           std::size_t n_draws = 100000, std::uint64_t seed = 1);

struct FokkerPlanckOptions {
    /// 0 = CFL-limited adaptive steps; otherwise a uniform step count, which
    /// must satisfy the stability limit.
    int n_time_steps = 0;
    double cfl = 0.4;
};

struct FokkerPlanckResult {
    DensityGrid density;
    int steps = 0;
    double max_mass_error = 0.0;  // max |mass - 1| over all steps
    double leaked = 0.0;          // mass lost through the grid ends
};

/// Evolves P_t = -(R P)' + (D P)''/2 in flux form from `initial.time` to
/// t_final. Throws NumericalError on CFL violation or leaked mass > 1e-4.
FokkerPlanckResult fokker_planck_evolve(const DensityGrid& initial, const DynParams& params,
                                        double t_final, const FokkerPlanckOptions& opts = {});

/// Grid x in [-20/gamma, 20/nu] (exponents at t_final) carrying a normalized
/// Gaussian of the given width at `center`; its time is set to the moment
/// the dynamics reach that variance (width^2 / (b^2 + b'^2) at alpha = 1).
DensityGrid initial_density_grid(const DynParams& params, double t_final, double width = 1e-3,
                                 std::size_t n_points = 4001, double center = 0.0);

/// Kolmogorov-Smirnov distance between a grid density and a sample.
double ks_distance(const DensityGrid& density, std::span<const double> samples);

struct DynamicShifts {
    double plus = 0.0;   // delta+ = delta + plus
    double minus = 0.0;  // delta- = delta + minus
};

/// Shifts of the dynamic solution: 2(R+ - R)/(b^2 nu^2) + ln(nu)/nu and
/// -2(R- - R)/(b'^2 gamma^2) + 2 ln(gamma)/gamma.
DynamicShifts dynamic_shifts(const DynParams& params, double gamma, double nu);

double dynamic_v_density(double x, double dt, const DynParams& params, double gamma, double nu,
                         double delta);

/// Relative residual (v_t + R v' + D v''/2) / v of the dynamic density, with
/// nu, gamma and delta following their horizon dependence (delta from R+ dt - 1/nu).
double dynamic_v_residual(double x, double dt, const DynParams& params);

/// Discounted payoff integrated against the dynamic density; branches are
/// split at in.params.delta. Discounts at params.r_hedge.
double dynamic_price(const ExpPriceInputs& in, const DynParams& params, OptionKind kind);
double dynamic_price(const ExpPriceInputs& in, const DynamicShifts& shifts, double r_hedge,
                     OptionKind kind);
double dynamic_price_quadrature(const ExpPriceInputs& in, const DynamicShifts& shifts,
                                double r_hedge, OptionKind kind);

struct FluctuationEstimates {
    double rms_ratio = 0.0;        // <du^2>^{1/2} / u with the local volatility
    double avg_based_ratio = 0.0;  // same with the average volatility
    double dD = 0.0;               // volatility change for a return move dx
};

FluctuationEstimates fluctuation_estimates(double x, double u, double u_prime,
                                           const DynParams& params, double gamma, double nu,
                                           double delta, double dt, double dx,
                                           NoiseKind noise = NoiseKind::TwoSidedExponential);

}  // namespace expopt
