#pragma once

// Market data: option quotes and price series, least-squares calibration of
// the exponential model to near-the-money quotes, tic rounding, and the
// market-vs-model comparison table.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expopt/pricing_context.hpp"

namespace expopt {

struct Quote {
    double strike = 0.0;
    OptionKind kind = OptionKind::Call;
    double price = 0.0;

    void validate() const;
};

struct PriceSeries {
    std::vector<std::int64_t> timestamps;  // seconds since the Unix epoch, UTC
    std::vector<double> prices;

    void validate() const;
};

/// x_i = ln(p_{i+lag} / p_i).
std::vector<double> log_returns(const PriceSeries& s, std::size_t lag = 1);

/// Header `strike,kind,price`, kind C or P.
std::vector<Quote> read_quotes_csv(std::istream& in);
std::vector<Quote> read_quotes_csv(const std::string& path);
/// Header `timestamp,price`, ISO-8601 timestamps (date, or date and time with
/// `T` or a space, optional trailing Z).
PriceSeries read_series_csv(std::istream& in);
PriceSeries read_series_csv(const std::string& path);
std::int64_t parse_iso8601(const std::string& text);

/// Puts struck below p0 and calls struck above, the `per_side` nearest to the
/// money by |ln(K/p0)| on each side.
std::vector<Quote> select_anchors(std::span<const Quote> quotes, double p0, std::size_t per_side = 3);

struct CalibrationOptions {
    /// false freezes (c, R) at their initial values.
    bool fit_rates = true;
    /// When set, (gamma, nu) are held at these horizon values and only the
    /// rates are fitted.
    std::optional<std::pair<double, double>> fixed_exponents;
    /// Explicit anchor set; empty = select_anchors.
    std::vector<Quote> anchors;
    double rate_lower = 0.0;
    double rate_upper = 0.25;
    double carry_lower = -0.25;
    double carry_upper = 0.25;
    double gamma_init = 0.0;  // 0 = guess from the nearest anchor's implied vol
    double nu_init = 0.0;
};

struct CalibrationResult {
    double gamma = 0.0;  // horizon exponents used in the pricing formulas
    double nu = 0.0;
    double gamma_annual = 0.0;  // gamma sqrt(dt): exponents per sqrt-year
    double nu_annual = 0.0;
    double delta = 0.0;
    double carry = 0.0;
    double discount = 0.0;
    double rms_fractional_deviation = 0.0;
    std::vector<Quote> anchors;
    int iterations = 0;
    bool converged = false;
};

/// Minimizes the summed squared fractional errors of exp_price_closed over
/// the anchors. Needs at least 4 anchors.
CalibrationResult calibrate(std::span<const Quote> quotes, double p0, double dt, double rate_init,
                            double carry_init, const CalibrationOptions& opts = {});

/// rms fractional deviation of the model at `result` over `anchors`.
double anchor_rms(std::span<const Quote> anchors, double p0, double dt, double gamma, double nu,
                  double carry, double rate);

/// ceil((raw + txn_cost_tics tic) / tic) tic.
double tic_adjust(double raw, double tic, double txn_cost_tics = 0.5);

struct ReportRow {
    Quote market;
    double market_iv = 0.0;      // NaN when the price admits no volatility
    double model_raw = 0.0;
    double model_price = 0.0;    // after tic_adjust
    double model_iv = 0.0;
};

/// Market and model columns for each quote. Implied vols use the futures
/// convention (zero carry in the Gaussian model) at the fitted discount rate.
std::vector<ReportRow> table_report(std::span<const Quote> quotes, const CalibrationResult& result,
                                    const PricingContext& ctx, double txn_cost_tics = 0.5);

/// One row of the reference comparison table.
struct Table1Row {
    Quote market;
    double market_iv = 0.0;
    double computed_price = 0.0;
    double computed_iv = 0.0;
    bool suspect = false;  // computed price looks misprinted
};

namespace table1 {
inline constexpr double kFutures = 89.92;
inline constexpr double kDays = 107.0;
inline constexpr double kGamma = 10.96;
inline constexpr double kNu = 16.76;
inline constexpr double kRms = 0.0027;
inline constexpr double kTic = 1.0 / 64.0;
double dt(double days_per_year = 365.0);
const std::vector<Table1Row>& rows();
std::vector<Quote> quotes();
}  // namespace table1

}  // namespace expopt
