#pragma once

// Numerical building blocks shared by the pricing and dynamics modules:
// adaptive Gauss-Kronrod quadrature, regularized incomplete gamma functions,
// and a bounded Nelder-Mead simplex minimizer.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace expopt::numerics {

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_intervals = 2000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

/// Adaptive 7/15-point Gauss-Kronrod on [a, b]. Intervals are bisected,
/// worst-error first, until the summed error estimate is below
/// max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Integrates over consecutive breakpoints [x0, x1], [x1, x2], ...
/// Kinks of the integrand should sit on breakpoints.
QuadratureResult integrate_pieces(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints,
                                  const QuadratureOptions& opts = {});

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);
/// Unregularized upper incomplete gamma Gamma(a, x).
double upper_incomplete_gamma(double a, double x);

struct SimplexOptions {
    int max_iterations = 500;
    int restarts = 3;
    double f_tol = 1e-15;
    double x_tol = 1e-12;
    double initial_step = 0.1;  // relative to |x0|, absolute when x0 == 0
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Nelder-Mead minimization with restarts from the incumbent. Coordinates are
/// clamped into [lower, upper] when bounds are given (empty spans = unbounded).
SimplexResult minimize_simplex(const std::function<double(std::span<const double>)>& f,
                               std::vector<double> x0, const SimplexOptions& opts = {},
                               std::span<const double> lower = {},
                               std::span<const double> upper = {});

}  // namespace expopt::numerics
