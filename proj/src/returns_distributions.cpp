#include "expopt/returns_distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "expopt/errors.hpp"
#include "expopt/random.hpp"

namespace expopt {

void ExpParams::validate() const {
    require(gamma > 0.0 && std::isfinite(gamma), "gamma must be positive (got " + std::to_string(gamma) + ")");
    require(nu > 0.0 && std::isfinite(nu), "nu must be positive (got " + std::to_string(nu) + ")");
    require(std::isfinite(delta), "delta must be finite");
}

void HistogramSpec::validate() const {
    require(bin_width > 0.0, "histogram bin width must be positive");
    require(lo < hi, "histogram range requires lo < hi");
}

double exp_density(double x, const ExpParams& p) {
    p.validate();
    const double a = p.normalization();
    return x < p.delta ? a * std::exp(p.gamma * (x - p.delta)) : a * std::exp(-p.nu * (x - p.delta));
}

double price_density(double y, const ExpParams& p) {
    require(y > 0.0, "price ratio y must be positive");
    p.validate();
    const double a = p.normalization();
    // Power-law branches, written in log form to stay finite for extreme y.
    const double ly = std::log(y);
    if (ly < p.delta) return a * std::exp(-p.gamma * p.delta + (p.gamma - 1.0) * ly);
    return a * std::exp(p.nu * p.delta - (p.nu + 1.0) * ly);
}

MomentReport exp_moments(const ExpParams& p) {
    p.validate();
    MomentReport m;
    m.mean_plus = p.delta + 1.0 / p.nu;
    m.mean_minus = p.delta - 1.0 / p.gamma;
    m.mean = p.delta + (p.gamma - p.nu) / (p.gamma * p.nu);
    m.var_plus = 1.0 / (p.nu * p.nu);
    m.var_minus = 1.0 / (p.gamma * p.gamma);
    m.var = m.var_plus + m.var_minus;
    return m;
}

double delta_from_carry(double carry, double dt, double gamma, double nu) {
    require(gamma > 0.0, "gamma must be positive");
    require(nu > 1.0, "nu must exceed 1: the mean price ratio <e^x> diverges for nu <= 1");
    // log1p keeps the limit gamma, nu -> infinity exact.
    return carry * dt + std::log1p(-1.0 / nu) + std::log1p(1.0 / gamma);
}

ConsistencyReport sample_consistency_report(std::span<const double> xs, double delta_hat) {
    ConsistencyReport r;
    double sum = 0.0;
    double sum_p = 0.0;
    double sum_m = 0.0;
    for (double x : xs) {
        sum += x;
        if (x > delta_hat) {
            ++r.n_plus;
            sum_p += x;
        } else if (x < delta_hat) {
            ++r.n_minus;
            sum_m += x;
        }
    }
    require(r.n_plus >= 10 && r.n_minus >= 10,
            "sample_consistency_report needs at least 10 samples on each side of delta_hat");
    const double n = static_cast<double>(xs.size());
    const double mean = sum / n;
    r.mean_plus = sum_p / r.n_plus;
    r.mean_minus = sum_m / r.n_minus;
    double ss = 0.0;
    double ss_p = 0.0;
    double ss_m = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
        if (x > delta_hat) ss_p += (x - r.mean_plus) * (x - r.mean_plus);
        else if (x < delta_hat) ss_m += (x - r.mean_minus) * (x - r.mean_minus);
    }
    r.var = ss / n;
    r.var_plus = ss_p / r.n_plus;
    r.var_minus = ss_m / r.n_minus;
    r.variance_defect = std::abs(r.var - (r.var_plus + r.var_minus)) / r.var;
    const double spread = r.mean_plus - r.mean_minus;
    r.spread_defect = std::abs(std::sqrt(r.var_plus) + std::sqrt(r.var_minus) - spread) / spread;
    return r;
}

Histogram build_histogram(std::span<const double> xs, const HistogramSpec& spec) {
    require(!xs.empty(), "build_histogram: empty input");
    spec.validate();
    const auto nbins = static_cast<std::size_t>(
        std::max(1.0, std::ceil((spec.hi - spec.lo) / spec.bin_width - 1e-9)));
    Histogram h;
    h.counts.assign(nbins, 0);
    h.centers.resize(nbins);
    for (std::size_t i = 0; i < nbins; ++i) h.centers[i] = spec.lo + (i + 0.5) * spec.bin_width;
    for (double x : xs) {
        if (x < spec.lo || x > spec.hi) continue;
        auto idx = static_cast<std::size_t>((x - spec.lo) / spec.bin_width);
        idx = std::min(idx, nbins - 1);
        ++h.counts[idx];
        ++h.in_range;
    }
    for (std::size_t i = 0; i < nbins; ++i) {
        if (h.counts[i] == 0) continue;
        h.log_centers.push_back(h.centers[i]);
        h.log_frequencies.push_back(std::log(static_cast<double>(h.counts[i])));
    }
    return h;
}

HistogramSpec freedman_diaconis_spec(std::span<const double> xs) {
    require(!xs.empty(), "build_histogram: empty input");
    std::vector<double> s(xs.begin(), xs.end());
    std::sort(s.begin(), s.end());
    auto quantile = [&](double q) {
        const double pos = q * (s.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - i;
        return i + 1 < s.size() ? s[i] * (1 - frac) + s[i + 1] * frac : s[i];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    double lo = s.front();
    double hi = s.back();
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(s.size()));
    if (!(width > 0.0)) width = hi > lo ? (hi - lo) / 10.0 : 1.0;
    if (!(hi > lo)) {
        lo -= 0.5 * width;
        hi += 0.5 * width;
    }
    return {width, lo, hi};
}

Histogram build_histogram(std::span<const double> xs) {
    return build_histogram(xs, freedman_diaconis_spec(xs));
}

double exp_quantile(double u, const ExpParams& p) {
    const double w_minus = p.nu / (p.gamma + p.nu);
    if (u < w_minus) return p.delta + std::log(u / w_minus) / p.gamma;
    return p.delta - std::log((1.0 - u) / (1.0 - w_minus)) / p.nu;
}

std::vector<double> sample_exp(const ExpParams& p, std::size_t n, std::uint64_t seed) {
    p.validate();
    RandomStream rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = exp_quantile(rng.uniform(), p);
    return out;
}

}  // namespace expopt
