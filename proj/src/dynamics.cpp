#include "expopt/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "expopt/errors.hpp"
#include "expopt/numerics.hpp"
#include "expopt/random.hpp"

namespace expopt {

void DynParams::validate() const {
    require(b > 0.0 && b_prime > 0.0, "b and b_prime must be positive");
    require(alpha >= 1.0 && alpha <= 2.0, "alpha must lie in [1, 2]");
    require(std::isfinite(r_plus) && std::isfinite(r_minus) && std::isfinite(r_hedge),
            "rates must be finite");
}

double DensityGrid::mass() const {
    if (x.size() < 2) return 0.0;
    const double h = spacing();
    double s = 0.0;
    for (double v : values) s += v;
    return h * (s - 0.5 * (values.front() + values.back()));
}

namespace {

// (scaled distance)^{2 - alpha}, clamped at 0; alpha = 2 gives 1 everywhere.
double singular_power(double scaled, double alpha) {
    const double e = 2.0 - alpha;
    if (e == 0.0) return 1.0;
    if (scaled <= 0.0) return 0.0;
    return e == 1.0 ? scaled : std::pow(scaled, e);
}

}  // namespace

double singular_diffusion(double x, const DynParams& params, double gamma, double nu,
                          double delta) {
    params.validate();
    if (x > delta) return params.b * params.b * singular_power(nu * (x - delta), params.alpha);
    if (x < delta)
        return params.b_prime * params.b_prime * singular_power(gamma * (delta - x), params.alpha);
    return params.alpha == 2.0 ? params.b * params.b : 0.0;
}

TailExponents predicted_exponents(double b, double b_prime, double dt) {
    require(dt > 0.0, "dt must be positive");
    require(b > 0.0 && b_prime > 0.0, "b and b_prime must be positive");
    const double s = std::sqrt(dt);
    return {1.0 / (b_prime * s), 1.0 / (b * s)};
}

DeltaViews delta_evolution(const DynParams& params, double dt, double gamma, double nu) {
    require(dt > 0.0, "dt must be positive");
    require(gamma > 0.0 && nu > 0.0, "gamma and nu must be positive");
    DeltaViews v;
    v.plus_view = params.r_plus * dt - 1.0 / nu;
    v.minus_view = params.r_minus * dt + 1.0 / gamma;
    v.consistency_defect = (params.r_plus - params.r_minus) * dt - (1.0 / gamma - 1.0 / nu);
    return v;
}

DiffusionFrame DiffusionFrame::at(const DynParams& params, double t) {
    const auto e = predicted_exponents(params.b, params.b_prime, t);
    DiffusionFrame f;
    f.t = t;
    f.gamma = e.gamma;
    f.nu = e.nu;
    f.delta_plus = params.r_plus * t - 1.0 / e.nu;
    f.delta_minus = params.r_minus * t + 1.0 / e.gamma;
    // b^2 nu (m - delta+) = b'^2 gamma (delta- - m), with b^2 nu = b / sqrt(t).
    f.boundary = (params.b * f.delta_plus + params.b_prime * f.delta_minus) /
                 (params.b + params.b_prime);
    return f;
}

double DiffusionFrame::diffusion(double x, const DynParams& params) const {
    if (plus_side(x))
        return params.b * params.b * singular_power(nu * (x - delta_plus), params.alpha);
    return params.b_prime * params.b_prime *
           singular_power(gamma * (delta_minus - x), params.alpha);
}

double DiffusionFrame::drift(double x, const DynParams& params) const {
    return plus_side(x) ? params.r_plus : params.r_minus;
}

namespace {

unsigned resolve_threads(unsigned requested, std::size_t work) {
    unsigned n = requested;
    if (n == 0) {
        if (const char* env = std::getenv("EXPOPT_THREADS")) n = static_cast<unsigned>(std::atoi(env));
        if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

}  // namespace

PathEnsemble simulate_returns(const DynParams& params, double dt_total, std::size_t n_paths,
                              int n_steps, std::uint64_t seed, const SimulationOptions& opts) {
    params.validate();
    require(n_paths >= 1, "n_paths must be at least 1");
    require(n_steps >= 1, "n_steps must be at least 1");
    require(dt_total > 0.0, "dt_total must be positive");

    const double h = dt_total / n_steps;
    std::vector<DiffusionFrame> frames(n_steps);
    for (int k = 0; k < n_steps; ++k) frames[k] = DiffusionFrame::at(params, (k + 1) * h);

    PathEnsemble out;
    out.horizon = dt_total;
    out.n_steps = n_steps;
    out.seed = seed;
    out.noise = opts.noise;
    out.samples.assign(n_paths, 0.0);

    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            RandomStream rng = RandomStream::for_path(seed, i);
            double x = 0.0;
            for (const auto& f : frames) {
                const double d = f.diffusion(x, params);
                const double eps =
                    opts.noise == NoiseKind::Gaussian ? rng.normal() : rng.laplace();
                x += f.drift(x, params) * h + std::sqrt(d * h) * eps;
            }
            out.samples[i] = x;
        }
    };

    const unsigned threads = resolve_threads(opts.threads, n_paths);
    if (threads <= 1) {
        run(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_paths + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t b = t * chunk;
            const std::size_t e = std::min(n_paths, b + chunk);
            if (b < e) pool.emplace_back(run, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

ExpFit fit_two_sided_exponential(std::span<const double> xs) {
    require(xs.size() >= 50, "fit_two_sided_exponential needs at least 50 samples");
    std::vector<double> s(xs.begin(), xs.end());
    for (double v : s) require(std::isfinite(v), "samples must be finite");
    std::sort(s.begin(), s.end());
    require(s.front() < s.back(), "degenerate sample: all values equal");

    const std::size_t n = s.size();
    const double total = std::accumulate(s.begin(), s.end(), 0.0);
    // For fixed delta the profile log-likelihood is -2n ln(sqrt S+ + sqrt S-) + const,
    // which is concave between data points, so the optimum sits on a sample.
    double best_score = std::numeric_limits<double>::infinity();
    std::size_t best = n;
    double below = 0.0;  // sum of s[0..i)
    for (std::size_t i = 0; i < n; ++i) {
        const double d = s[i];
        const double above = total - below - d;
        const double s_minus = d * static_cast<double>(i) - below;
        const double s_plus = above - d * static_cast<double>(n - i - 1);
        if (s_minus > 0.0 && s_plus > 0.0) {
            const double score = std::sqrt(s_plus) + std::sqrt(s_minus);
            if (score < best_score) {
                best_score = score;
                best = i;
            }
        }
        below += d;
    }
    require(best < n, "degenerate sample: no interior split");

    const double d = s[best];
    double s_plus = 0.0;
    double s_minus = 0.0;
    for (double v : s) (v > d ? s_plus : s_minus) += std::abs(v - d);
    const double rho = std::sqrt(s_plus / s_minus);
    ExpFit fit;
    fit.delta = d;
    fit.nu = static_cast<double>(n) * rho / (s_plus * (1.0 + rho));
    fit.gamma = rho * fit.nu;
    fit.loglik = static_cast<double>(n) * std::log(fit.gamma * fit.nu / (fit.gamma + fit.nu)) -
                 fit.nu * s_plus - fit.gamma * s_minus;
    return fit;
}

AverageVolatility average_volatility_check(const DynParams& params, double dt, Side side,
                                           std::size_t n_draws, std::uint64_t seed) {
    params.validate();
    require(dt > 0.0, "dt must be positive");
    require(n_draws >= 1, "n_draws must be at least 1");
    const double a = params.alpha;
    const double scale = side == Side::Plus ? params.b : params.b_prime;
    AverageVolatility out;
    // z = rate |x - delta| has density prop. to exp(-z^alpha), so <z^{2-alpha}> is
    // Gamma(3/alpha - 1) / Gamma(1/alpha), independent of dt.
    out.scaling_constant = std::exp(std::lgamma(3.0 / a - 1.0) - std::lgamma(1.0 / a));
    out.analytic = scale * scale * dt * out.scaling_constant;

    const auto e = predicted_exponents(params.b, params.b_prime, dt);
    const double rate = side == Side::Plus ? e.nu : e.gamma;
    const double delta = side == Side::Plus ? params.r_plus * dt - 1.0 / e.nu
                                            : params.r_minus * dt + 1.0 / e.gamma;
    RandomStream rng(seed);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_draws; ++i) {
        const double z = a == 1.0 ? rng.exponential() : std::pow(rng.gamma(1.0 / a), 1.0 / a);
        const double x = side == Side::Plus ? delta + z / rate : delta - z / rate;
        const double gap = side == Side::Plus ? x - delta : delta - x;
        acc += scale * scale * singular_power(rate * gap, a);
    }
    out.monte_carlo = acc / static_cast<double>(n_draws) * dt;
    return out;
}

FokkerPlanckResult fokker_planck_evolve(const DensityGrid& initial, const DynParams& params,
                                        double t_final, const FokkerPlanckOptions& opts) {
    params.validate();
    const std::size_t n = initial.x.size();
    require(n >= 3 && initial.values.size() == n, "density grid needs at least 3 matching points");
    require(initial.time > 0.0, "initial density time must be positive");
    require(t_final > initial.time, "t_final must exceed the initial time");
    require(opts.n_time_steps >= 0, "n_time_steps must be non-negative");
    require(opts.cfl > 0.0 && opts.cfl <= 1.0, "cfl must lie in (0, 1]");
    const double h = initial.spacing();
    require(h > 0.0, "grid must be increasing");

    FokkerPlanckResult res;
    res.density = initial;
    std::vector<double>& p = res.density.values;
    std::vector<double> dp(n);        // D_i P_i
    std::vector<double> flux(n + 1);  // flux through face i - 1/2
    const double mass0 = initial.mass();
    require(std::abs(mass0 - 1.0) <= 1e-6, "initial density must be normalized");

    const double uniform_step =
        opts.n_time_steps > 0 ? (t_final - initial.time) / opts.n_time_steps : 0.0;
    double t = initial.time;
    const double x0 = initial.x.front();
    double leaked = 0.0;

    while (t < t_final) {
        // Coefficients at the step midpoint, estimated with the tentative step.
        const DiffusionFrame probe = DiffusionFrame::at(params, t);
        // D grows monotonically away from the side boundary, so it peaks at an end.
        const double dmax = std::max(probe.diffusion(initial.x.front(), params),
                                     probe.diffusion(initial.x.back(), params));
        const double rmax = std::max(std::abs(params.r_plus), std::abs(params.r_minus));
        const double rate = dmax / (h * h) + rmax / h;
        double step;
        if (opts.n_time_steps > 0) {
            step = std::min(uniform_step, t_final - t);
            if (step * rate > 1.0)
                throw NumericalError("fokker_planck_evolve: CFL violation, step " +
                                     std::to_string(step) + " exceeds stability limit " +
                                     std::to_string(1.0 / rate) + "; use more time steps");
        } else {
            step = std::min(opts.cfl / rate, t_final - t);
        }
        if (t_final - t - step < 1e-14 * t_final) step = t_final - t;

        const DiffusionFrame f = DiffusionFrame::at(params, t + 0.5 * step);
        for (std::size_t i = 0; i < n; ++i) dp[i] = f.diffusion(initial.x[i], params) * p[i];
        // Interior faces: upwind drift, centered diffusion.
        for (std::size_t i = 1; i < n; ++i) {
            const double xf = x0 + (static_cast<double>(i) - 0.5) * h;
            const double r = f.drift(xf, params);
            const double adv = r > 0.0 ? r * p[i - 1] : r * p[i];
            flux[i] = adv - 0.5 * (dp[i] - dp[i - 1]) / h;
        }
        // Outflow faces with zero ghost density.
        {
            const double rl = f.drift(x0 - 0.5 * h, params);
            flux[0] = (rl < 0.0 ? rl * p[0] : 0.0) - 0.5 * dp[0] / h;
            const double rr = f.drift(initial.x.back() + 0.5 * h, params);
            flux[n] = (rr > 0.0 ? rr * p[n - 1] : 0.0) + 0.5 * dp[n - 1] / h;
        }
        for (std::size_t i = 0; i < n; ++i) p[i] -= step / h * (flux[i + 1] - flux[i]);
        leaked += step * (flux[n] - flux[0]);
        t += step;
        ++res.steps;

        const double err = std::abs(res.density.mass() - 1.0);
        res.max_mass_error = std::max(res.max_mass_error, err);
        if (leaked > 1e-4)
            throw NumericalError("fokker_planck_evolve: mass leak " + std::to_string(leaked) +
                                 " through the grid ends; widen the grid");
    }
    res.density.time = t_final;
    res.leaked = leaked;
    return res;
}

DensityGrid initial_density_grid(const DynParams& params, double t_final, double width,
                                 std::size_t n_points, double center) {
    params.validate();
    require(t_final > 0.0, "t_final must be positive");
    require(width > 0.0, "width must be positive");
    require(n_points >= 3, "need at least 3 grid points");
    const DiffusionFrame f = DiffusionFrame::at(params, t_final);
    const double lo = std::min(center, f.boundary) - 20.0 / f.gamma;
    const double hi = std::max(center, f.boundary) + 20.0 / f.nu;
    DensityGrid g;
    g.x.resize(n_points);
    g.values.resize(n_points);
    const double h = (hi - lo) / static_cast<double>(n_points - 1);
    const double w = std::max(width, 3.0 * h);
    for (std::size_t i = 0; i < n_points; ++i) {
        g.x[i] = lo + static_cast<double>(i) * h;
        const double z = (g.x[i] - center) / w;
        g.values[i] = std::exp(-0.5 * z * z);
    }
    const double m = g.mass();
    for (double& v : g.values) v /= m;
    // Variance grows at (b^2 + b'^2) t for alpha = 1 and at the mean of b^2, b'^2
    // for alpha = 2; interpolate in between.
    const double growth = (params.b * params.b + params.b_prime * params.b_prime) *
                          (1.0 - 0.5 * (params.alpha - 1.0));
    g.time = w * w / growth;
    require(g.time < t_final, "initial width too large for t_final");
    return g;
}

double ks_distance(const DensityGrid& density, std::span<const double> samples) {
    require(density.x.size() >= 2, "density grid too small");
    require(!samples.empty(), "no samples");
    const std::size_t n = density.x.size();
    const double h = density.spacing();
    std::vector<double> cdf(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        cdf[i] = cdf[i - 1] + 0.5 * h * (density.values[i - 1] + density.values[i]);
    const double total = cdf.back();
    auto grid_cdf = [&](double x) {
        if (x <= density.x.front()) return 0.0;
        if (x >= density.x.back()) return 1.0;
        const double u = (x - density.x.front()) / h;
        const auto i = std::min(static_cast<std::size_t>(u), n - 2);
        const double frac = u - static_cast<double>(i);
        return (cdf[i] + frac * (cdf[i + 1] - cdf[i])) / total;
    };
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    const double m = static_cast<double>(s.size());
    double dist = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        const double fx = grid_cdf(s[j]);
        dist = std::max({dist, std::abs(fx - static_cast<double>(j) / m),
                         std::abs(fx - static_cast<double>(j + 1) / m)});
    }
    return dist;
}

DynamicShifts dynamic_shifts(const DynParams& params, double gamma, double nu) {
    params.validate();
    require(gamma > 0.0 && nu > 0.0, "gamma and nu must be positive");
    const double dr_plus = params.r_plus - params.r_hedge;
    const double dr_minus = params.r_minus - params.r_hedge;
    DynamicShifts s;
    s.plus = 2.0 * dr_plus / (params.b * params.b * nu * nu) + std::log(nu) / nu;
    s.minus = -2.0 * dr_minus / (params.b_prime * params.b_prime * gamma * gamma) +
              2.0 * std::log(gamma) / gamma;
    return s;
}

double dynamic_v_density(double x, double /*dt*/, const DynParams& params, double gamma,
                         double nu, double delta) {
    const DynamicShifts s = dynamic_shifts(params, gamma, nu);
    const double a = gamma * nu / (gamma + nu);
    if (x > delta) return a * std::exp(-nu * (x - delta - s.plus));
    return a * std::exp(gamma * (x - delta - s.minus));
}

double dynamic_v_residual(double x, double dt, const DynParams& params) {
    params.validate();
    require(dt > 0.0, "dt must be positive");
    auto v = [&](double xx, double tau) {
        const auto e = predicted_exponents(params.b, params.b_prime, tau);
        const double delta = params.r_plus * tau - 1.0 / e.nu;
        return dynamic_v_density(xx, tau, params, e.gamma, e.nu, delta);
    };
    const auto e = predicted_exponents(params.b, params.b_prime, dt);
    const double delta = params.r_plus * dt - 1.0 / e.nu;
    require(std::abs(x - delta) > 1e-3 / std::max(e.nu, e.gamma),
            "residual is evaluated away from the kink at delta");
    const double hx = 1e-4 / std::max(e.nu, e.gamma);
    const double ht = 1e-5 * dt;
    const double v0 = v(x, dt);
    const double v1 = (v(x + hx, dt) - v(x - hx, dt)) / (2.0 * hx);
    const double v2 = (v(x + hx, dt) - 2.0 * v0 + v(x - hx, dt)) / (hx * hx);
    // Calendar time runs opposite to time to expiry.
    const double vt = -(v(x, dt + ht) - v(x, dt - ht)) / (2.0 * ht);
    const double r = x > delta ? params.r_plus : params.r_minus;
    const double d = singular_diffusion(x, params, e.gamma, e.nu, delta);
    return (vt + r * v1 + 0.5 * d * v2) / v0;
}

double dynamic_price(const ExpPriceInputs& in, const DynParams& params, OptionKind kind) {
    in.validate();
    return dynamic_price(in, dynamic_shifts(params, in.params.gamma, in.params.nu),
                         params.r_hedge, kind);
}

double dynamic_price(const ExpPriceInputs& in, const DynamicShifts& shifts, double r_hedge,
                     OptionKind kind) {
    in.validate();
    const double g = in.params.gamma;
    const double nu = in.params.nu;
    const double delta = in.params.delta;
    const double p0 = in.ctx.p0;
    const double k = in.strike;
    const double a = g * nu / (g + nu);
    // Branch amplitudes at delta.
    const double a_plus = a * std::exp(nu * shifts.plus);
    const double a_minus = a * std::exp(-g * shifts.minus);
    const double xk = in.log_moneyness();

    const double mass = a_plus / nu + a_minus / g;
    const double mean_price = p0 * std::exp(delta) * (a_plus / (nu - 1.0) + a_minus / (g + 1.0));
    double value;
    if (xk >= delta) {
        const double call = a_plus * std::exp(-nu * (xk - delta)) * k / (nu * (nu - 1.0));
        value = kind == OptionKind::Call ? call : k * mass - mean_price + call;
    } else {
        const double put = a_minus * std::exp(g * (xk - delta)) * k / (g * (g + 1.0));
        value = kind == OptionKind::Put ? put : mean_price - k * mass + put;
    }
    return std::exp(-r_hedge * in.ctx.dt) * std::max(value, 0.0);
}

double dynamic_price_quadrature(const ExpPriceInputs& in, const DynamicShifts& shifts,
                                double r_hedge, OptionKind kind) {
    in.validate();
    const double g = in.params.gamma;
    const double nu = in.params.nu;
    const double delta = in.params.delta;
    const double a = g * nu / (g + nu);
    const double xk = in.log_moneyness();
    auto integrand = [&](double x) {
        const double payoff = kind == OptionKind::Call ? in.ctx.p0 * std::exp(x) - in.strike
                                                       : in.strike - in.ctx.p0 * std::exp(x);
        const double v = x > delta ? a * std::exp(-nu * (x - delta - shifts.plus))
                                   : a * std::exp(g * (x - delta - shifts.minus));
        return payoff * v;
    };
    numerics::QuadratureOptions opts{.abs_tol = 0.0, .rel_tol = 1e-13};
    double value;
    if (kind == OptionKind::Call) {
        const double hi = std::max(xk, delta) + 40.0 / (nu - 1.0);
        const std::array<double, 3> pts{xk, std::max(xk, delta), hi};
        value = numerics::integrate_pieces(integrand, pts, opts).value;
    } else {
        const double lo = std::min(xk, delta) - 40.0 / g;
        const std::array<double, 3> pts{lo, std::min(xk, delta), xk};
        value = numerics::integrate_pieces(integrand, pts, opts).value;
    }
    return std::exp(-r_hedge * in.ctx.dt) * value;
}

FluctuationEstimates fluctuation_estimates(double x, double u, double u_prime,
                                           const DynParams& params, double /*gamma*/, double nu,
                                           double delta, double dt, double dx, NoiseKind noise) {
    params.validate();
    require(u > 0.0, "option price u must be positive");
    require(dt > 0.0, "dt must be positive");
    const double eps4 = noise == NoiseKind::Gaussian ? 3.0 : 6.0;
    const double scale2 = x < delta ? params.b_prime * params.b_prime : params.b * params.b;
    const double elasticity = std::abs(u_prime / u);
    FluctuationEstimates out;
    out.rms_ratio = elasticity * scale2 * std::abs(delta - x) * std::sqrt(eps4) * std::sqrt(dt);
    out.avg_based_ratio = elasticity * scale2 * std::sqrt(dt);
    out.dD = -params.b * params.b * nu * dx;
    return out;
}

}  // namespace expopt
