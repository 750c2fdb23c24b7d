#pragma once

// Two-sided exponential density of log-returns x = ln(p(t)/p(0)):
//
//   P(x) = A exp( gamma (x - delta))   x <  delta
//   P(x) = A exp(-nu    (x - delta))   x >= delta,   A = gamma nu / (gamma + nu)
//
// together with its moments, the carry-consistent peak location, the induced
// fat-tailed density of the price ratio, and sample diagnostics.

#include <cstdint>
#include <span>
#include <vector>

namespace expopt {

/// Trading-time conventions: 9 trading hours per day, and 2916 trading hours
/// per year (the horizon at which nu = 540 per hour falls to nu = 10).
inline constexpr double kTradingHoursPerDay = 9.0;
inline constexpr double kTradingHoursPerYear = 2916.0;

constexpr double hours_to_years(double hours) { return hours / kTradingHoursPerYear; }

struct ExpParams {
    double gamma = 1.0;  // left tail rate
    double nu = 1.0;     // right tail rate
    double delta = 0.0;  // peak location

    /// Throws DomainError unless gamma > 0 and nu > 0.
    void validate() const;
    double normalization() const { return gamma * nu / (gamma + nu); }
    /// Probability mass on x >= delta.
    double upper_mass() const { return gamma / (gamma + nu); }
};

struct MomentReport {
    double mean_plus = 0.0;   // E[x | x > delta]
    double mean_minus = 0.0;  // E[x | x < delta]
    double mean = 0.0;
    double var_plus = 0.0;    // Var[x | x > delta]
    double var_minus = 0.0;   // Var[x | x < delta]
    double var = 0.0;
};

struct HistogramSpec {
    double bin_width = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    void validate() const;
};

struct Histogram {
    std::vector<double> centers;
    std::vector<std::size_t> counts;
    /// (center, ln count) for every non-empty bin.
    std::vector<double> log_centers;
    std::vector<double> log_frequencies;
    std::size_t in_range = 0;
};

struct ConsistencyReport {
    std::size_t n_plus = 0;
    std::size_t n_minus = 0;
    double var = 0.0;
    double var_plus = 0.0;
    double var_minus = 0.0;
    double mean_plus = 0.0;
    double mean_minus = 0.0;
    /// |var - (var_plus + var_minus)| / var
    double variance_defect = 0.0;
    /// |(sd_plus + sd_minus) - (mean_plus - mean_minus)| / (mean_plus - mean_minus)
    double spread_defect = 0.0;
};

double exp_density(double x, const ExpParams& p);

/// Density of y = p(t)/p(0); equals exp_density(ln y) / y.
double price_density(double y, const ExpParams& p);

MomentReport exp_moments(const ExpParams& p);

/// Peak location that makes <e^x> = e^{c dt}. Requires nu > 1.
double delta_from_carry(double carry, double dt, double gamma, double nu);

ConsistencyReport sample_consistency_report(std::span<const double> xs, double delta_hat);

Histogram build_histogram(std::span<const double> xs, const HistogramSpec& spec);
/// Freedman-Diaconis binning over the sample range.
Histogram build_histogram(std::span<const double> xs);
HistogramSpec freedman_diaconis_spec(std::span<const double> xs);

/// Inverse-CDF draws from the two-sided exponential.
std::vector<double> sample_exp(const ExpParams& p, std::size_t n, std::uint64_t seed);
double exp_quantile(double u, const ExpParams& p);

}  // namespace expopt
