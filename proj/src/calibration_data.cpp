#include "expopt/calibration_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "expopt/errors.hpp"
#include "expopt/exponential_pricing.hpp"
#include "expopt/gaussian_pricing.hpp"
#include "expopt/numerics.hpp"
#include "expopt/returns_distributions.hpp"

namespace expopt {

void Quote::validate() const {
    require(strike > 0.0, "quote strike must be positive");
    require(price >= 0.0, "quote price must be non-negative");
}

void PriceSeries::validate() const {
    require(timestamps.size() == prices.size(), "series timestamps and prices differ in length");
    for (std::size_t i = 0; i < prices.size(); ++i) {
        require(prices[i] > 0.0, "series prices must be positive");
        if (i > 0) require(timestamps[i] > timestamps[i - 1], "series timestamps must increase strictly");
    }
}

std::vector<double> log_returns(const PriceSeries& s, std::size_t lag) {
    s.validate();
    require(lag >= 1, "lag must be at least 1");
    require(s.prices.size() > lag, "series too short for the requested lag");
    std::vector<double> out(s.prices.size() - lag);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(s.prices[i + lag] / s.prices[i]);
    return out;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    return out;
}

double parse_number(const std::string& text, const std::string& what, std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size())
        throw DomainError("line " + std::to_string(line) + ": invalid " + what + " '" + text + "'");
    return v;
}

std::ifstream open_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path + "'");
    return in;
}

}  // namespace

std::vector<Quote> read_quotes_csv(std::istream& in) {
    std::string line;
    std::size_t n = 0;
    std::vector<Quote> out;
    bool header = false;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (!header) {
            require(cells == std::vector<std::string>{"strike", "kind", "price"},
                    "quotes csv must start with the header strike,kind,price");
            header = true;
            continue;
        }
        require(cells.size() == 3, "line " + std::to_string(n) + ": expected 3 fields");
        Quote q;
        q.strike = parse_number(cells[0], "strike", n);
        if (cells[1] == "C" || cells[1] == "c") {
            q.kind = OptionKind::Call;
        } else if (cells[1] == "P" || cells[1] == "p") {
            q.kind = OptionKind::Put;
        } else {
            throw DomainError("line " + std::to_string(n) + ": kind must be C or P");
        }
        q.price = parse_number(cells[2], "price", n);
        q.validate();
        out.push_back(q);
    }
    require(header, "quotes csv is empty");
    return out;
}

std::vector<Quote> read_quotes_csv(const std::string& path) {
    auto in = open_file(path);
    return read_quotes_csv(in);
}

std::int64_t parse_iso8601(const std::string& text) {
    std::string s = trim(text);
    if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.pop_back();
    std::replace(s.begin(), s.end(), 'T', ' ');
    std::tm tm{};
    std::istringstream is(s);
    if (s.size() <= 10) {
        is >> std::get_time(&tm, "%Y-%m-%d");
    } else if (s.size() <= 16) {
        is >> std::get_time(&tm, "%Y-%m-%d %H:%M");
    } else {
        is >> std::get_time(&tm, "%Y-%m-%d %H:%M:%S");
    }
    if (is.fail() || is.peek() != std::char_traits<char>::eof())
        throw DomainError("invalid ISO-8601 timestamp '" + text + "'");
    return static_cast<std::int64_t>(timegm(&tm));
}

PriceSeries read_series_csv(std::istream& in) {
    std::string line;
    std::size_t n = 0;
    PriceSeries out;
    bool header = false;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (!header) {
            require(cells == std::vector<std::string>{"timestamp", "price"},
                    "series csv must start with the header timestamp,price");
            header = true;
            continue;
        }
        require(cells.size() == 2, "line " + std::to_string(n) + ": expected 2 fields");
        out.timestamps.push_back(parse_iso8601(cells[0]));
        out.prices.push_back(parse_number(cells[1], "price", n));
    }
    require(header, "series csv is empty");
    out.validate();
    return out;
}

PriceSeries read_series_csv(const std::string& path) {
    auto in = open_file(path);
    return read_series_csv(in);
}

std::vector<Quote> select_anchors(std::span<const Quote> quotes, double p0, std::size_t per_side) {
    require(p0 > 0.0, "p0 must be positive");
    std::vector<Quote> puts;
    std::vector<Quote> calls;
    for (const auto& q : quotes) {
        q.validate();
        if (q.kind == OptionKind::Put && q.strike < p0) puts.push_back(q);
        if (q.kind == OptionKind::Call && q.strike > p0) calls.push_back(q);
    }
    auto by_moneyness = [p0](const Quote& a, const Quote& b) {
        return std::abs(std::log(a.strike / p0)) < std::abs(std::log(b.strike / p0));
    };
    std::stable_sort(puts.begin(), puts.end(), by_moneyness);
    std::stable_sort(calls.begin(), calls.end(), by_moneyness);
    puts.resize(std::min(puts.size(), per_side));
    calls.resize(std::min(calls.size(), per_side));
    std::vector<Quote> out(puts.rbegin(), puts.rend());
    out.insert(out.end(), calls.begin(), calls.end());
    return out;
}

namespace {

double model_price(const Quote& q, double p0, double dt, double gamma, double nu, double carry,
                   double rate) {
    ExpPriceInputs in;
    in.ctx.p0 = p0;
    in.ctx.dt = dt;
    in.ctx.carry_rate = carry;
    in.ctx.discount_rate = rate;
    in.params = {gamma, nu, delta_from_carry(carry, dt, gamma, nu)};
    in.strike = q.strike;
    return exp_price_closed(in, q.kind);
}

double sum_sq_fractional(std::span<const Quote> anchors, double p0, double dt, double gamma,
                         double nu, double carry, double rate) {
    double s = 0.0;
    for (const auto& q : anchors) {
        const double f = (model_price(q, p0, dt, gamma, nu, carry, rate) - q.price) / q.price;
        s += f * f;
    }
    return s;
}

}  // namespace

double anchor_rms(std::span<const Quote> anchors, double p0, double dt, double gamma, double nu,
                  double carry, double rate) {
    require(!anchors.empty(), "no anchors");
    return std::sqrt(sum_sq_fractional(anchors, p0, dt, gamma, nu, carry, rate) /
                     static_cast<double>(anchors.size()));
}

CalibrationResult calibrate(std::span<const Quote> quotes, double p0, double dt, double rate_init,
                            double carry_init, const CalibrationOptions& opts) {
    require(p0 > 0.0, "p0 must be positive");
    require(dt > 0.0, "dt must be positive");
    std::vector<Quote> anchors =
        opts.anchors.empty() ? select_anchors(quotes, p0) : opts.anchors;
    for (const auto& q : anchors) {
        q.validate();
        require(q.price > 0.0, "anchor prices must be positive for fractional errors");
    }
    const bool fixed = opts.fixed_exponents.has_value();
    const std::size_t n_free = (fixed ? 0 : 2) + (opts.fit_rates ? 2 : 0);
    require(n_free > 0, "nothing to fit: exponents fixed and rates frozen");
    require(anchors.size() >= 4, "calibration needs at least 4 usable quotes (puts below p0, "
                                 "calls above), got " + std::to_string(anchors.size()));

    double g0 = opts.gamma_init;
    double n0 = opts.nu_init;
    if (fixed) {
        g0 = opts.fixed_exponents->first;
        n0 = opts.fixed_exponents->second;
    } else if (g0 <= 0.0 || n0 <= 1.0) {
        // Match the variance 1/gamma^2 + 1/nu^2 to the nearest anchor's Black vol.
        PricingContext ctx;
        ctx.p0 = p0;
        ctx.dt = dt;
        ctx.discount_rate = rate_init;
        double sigma = 0.2;
        try {
            sigma = implied_vol(ctx, anchors.front().strike, anchors.front().kind, anchors.front().price);
        } catch (const std::exception&) {
        }
        const double rate = std::sqrt(2.0) / (sigma * std::sqrt(dt));
        g0 = rate;
        n0 = std::max(rate, 1.5);
    }

    // Parameter vector: [gamma, nu] (unless fixed) then [carry, rate] (if fitted).
    std::vector<double> x0;
    std::vector<double> lo;
    std::vector<double> hi;
    if (!fixed) {
        x0.insert(x0.end(), {g0, n0});
        lo.insert(lo.end(), {1e-3, 1.0 + 1e-6});
        hi.insert(hi.end(), {1e5, 1e5});
    }
    if (opts.fit_rates) {
        x0.insert(x0.end(), {std::clamp(carry_init, opts.carry_lower, opts.carry_upper),
                             std::clamp(rate_init, opts.rate_lower, opts.rate_upper)});
        lo.insert(lo.end(), {opts.carry_lower, opts.rate_lower});
        hi.insert(hi.end(), {opts.carry_upper, opts.rate_upper});
    }
    auto unpack = [&](std::span<const double> x) {
        std::array<double, 4> v{g0, n0, carry_init, rate_init};
        std::size_t i = 0;
        if (!fixed) {
            v[0] = x[i++];
            v[1] = x[i++];
        }
        if (opts.fit_rates) {
            v[2] = x[i++];
            v[3] = x[i++];
        }
        return v;
    };
    auto objective = [&](std::span<const double> x) {
        const auto v = unpack(x);
        try {
            return sum_sq_fractional(anchors, p0, dt, v[0], v[1], v[2], v[3]);
        } catch (const DomainError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    numerics::SimplexOptions sopts;
    sopts.max_iterations = 500;
    sopts.restarts = 6;
    sopts.f_tol = 1e-16;
    sopts.x_tol = 1e-7;
    const auto best = numerics::minimize_simplex(objective, x0, sopts, lo, hi);
    if (!(best.value < std::numeric_limits<double>::max()))
        throw NumericalError("calibration failed: no finite objective value reached");

    const auto v = unpack(best.x);
    CalibrationResult r;
    r.gamma = v[0];
    r.nu = v[1];
    r.carry = v[2];
    r.discount = v[3];
    r.gamma_annual = r.gamma * std::sqrt(dt);
    r.nu_annual = r.nu * std::sqrt(dt);
    r.delta = delta_from_carry(r.carry, dt, r.gamma, r.nu);
    r.rms_fractional_deviation = anchor_rms(anchors, p0, dt, r.gamma, r.nu, r.carry, r.discount);
    r.anchors = std::move(anchors);
    r.iterations = best.iterations;
    r.converged = best.converged;
    return r;
}

double tic_adjust(double raw, double tic, double txn_cost_tics) {
    require(tic > 0.0, "tic must be positive");
    require(raw >= 0.0, "raw price must be non-negative");
    require(txn_cost_tics >= 0.0, "transaction cost must be non-negative");
    const double units = (raw + txn_cost_tics * tic) / tic;
    // Absorb representation error so a price already on a tic stays put.
    return std::ceil(units - 1e-9) * tic;
}

std::vector<ReportRow> table_report(std::span<const Quote> quotes, const CalibrationResult& result,
                                    const PricingContext& ctx, double txn_cost_tics) {
    ctx.validate();
    PricingContext iv_ctx = ctx;
    iv_ctx.carry_rate = 0.0;
    iv_ctx.discount_rate = result.discount;
    auto vol = [&](const Quote& q, double price) {
        try {
            return implied_vol(iv_ctx, q.strike, q.kind, price);
        } catch (const std::exception&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    std::vector<ReportRow> out;
    out.reserve(quotes.size());
    for (const auto& q : quotes) {
        ReportRow row;
        row.market = q;
        row.market_iv = vol(q, q.price);
        row.model_raw = model_price(q, ctx.p0, ctx.dt, result.gamma, result.nu, result.carry,
                                    result.discount);
        row.model_price = tic_adjust(row.model_raw, ctx.tic, txn_cost_tics);
        row.model_iv = vol(q, row.model_price);
        out.push_back(row);
    }
    return out;
}

namespace table1 {

double dt(double days_per_year) {
    require(days_per_year > 0.0, "days per year must be positive");
    return kDays / days_per_year;
}

const std::vector<Table1Row>& rows() {
    static const std::vector<Table1Row> data = [] {
        using K = OptionKind;
        std::vector<Table1Row> r = {
            {{76, K::Put, 0.047}, 0.150, 0.031, 0.139, false},
            {{78, K::Put, 0.063}, 0.136, 0.047, 0.129, false},
            {{80, K::Put, 0.110}, 0.128, 0.093, 0.128, false},
            {{82, K::Put, 0.172}, 0.116, 0.172, 0.117, false},
            {{84, K::Put, 0.313}, 0.109, 0.297, 0.108, false},
            {{86, K::Put, 0.594}, 0.104, 0.594, 0.104, false},
            {{88, K::Put, 1.078}, 0.100, 1.078, 0.100, false},
            {{90, K::Put, 1.852}, 0.095, 2.859, 0.096, true},
            {{92, K::Put, 3.000}, 0.093, 2.984, 0.093, false},
            {{94, K::Call, 0.469}, 0.093, 0.469, 0.093, false},
            {{96, K::Call, 0.219}, 0.094, 0.219, 0.094, false},
            {{98, K::Call, 0.109}, 0.098, 0.109, 0.098, false},
            {{100, K::Call, 0.047}, 0.100, 0.063, 0.104, false},
            {{102, K::Call, 0.016}, 0.098, 0.031, 0.106, false},
            {{104, K::Call, 0.016}, 0.109, 0.016, 0.109, false},
        };
        return r;
    }();
    return data;
}

std::vector<Quote> quotes() {
    std::vector<Quote> out;
    for (const auto& r : rows()) out.push_back(r.market);
    return out;
}

}  // namespace table1

}  // namespace expopt
