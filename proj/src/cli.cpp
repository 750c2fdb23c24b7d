#include "expopt/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <variant>

#include "expopt/capm.hpp"
#include "expopt/errors.hpp"
#include "expopt/exponential_pricing.hpp"
#include "expopt/gaussian_pricing.hpp"
#include "expopt/stretched_pricing.hpp"

namespace expopt::cli {

std::string format_number(double v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

namespace {

using Value = std::variant<double, long long, std::string>;

// Scalars plus an optional table, rendered as text, csv or json.
struct Report {
    std::vector<std::pair<std::string, Value>> scalars;
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;

    void add(const std::string& key, Value v) { scalars.emplace_back(key, std::move(v)); }
};

std::string render_value(const Value& v, int digits) {
    if (const auto* d = std::get_if<double>(&v)) return format_number(*d, digits);
    if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
    return std::get<std::string>(v);
}

nlohmann::json json_value(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) {
        if (!std::isfinite(*d)) return nullptr;
        return std::stod(format_number(*d, 12));
    }
    if (const auto* i = std::get_if<long long>(&v)) return *i;
    return std::get<std::string>(v);
}

void render(const Report& r, const std::string& format, std::ostream& out) {
    if (format == "json") {
        nlohmann::ordered_json j;
        for (const auto& [k, v] : r.scalars) j[k] = json_value(v);
        if (!r.columns.empty()) {
            auto rows = nlohmann::ordered_json::array();
            for (const auto& row : r.rows) {
                nlohmann::ordered_json o;
                for (std::size_t c = 0; c < r.columns.size(); ++c) o[r.columns[c]] = json_value(row[c]);
                rows.push_back(o);
            }
            j["rows"] = rows;
        }
        out << j.dump(2) << "\n";
        return;
    }
    if (format == "csv") {
        if (!r.columns.empty()) {
            for (std::size_t c = 0; c < r.columns.size(); ++c) out << (c ? "," : "") << r.columns[c];
            out << "\n";
            for (const auto& row : r.rows) {
                for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << render_value(row[c], 12);
                out << "\n";
            }
        } else {
            out << "key,value\n";
            for (const auto& [k, v] : r.scalars) out << k << "," << render_value(v, 12) << "\n";
        }
        return;
    }
    std::size_t width = 0;
    for (const auto& s : r.scalars) width = std::max(width, s.first.size());
    for (const auto& [k, v] : r.scalars) {
        out << k << std::string(width - k.size() + 2, ' ') << render_value(v, 6) << "\n";
    }
    if (r.columns.empty()) return;
    if (!r.scalars.empty()) out << "\n";
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> w(r.columns.size());
    for (std::size_t c = 0; c < r.columns.size(); ++c) w[c] = r.columns[c].size();
    for (const auto& row : r.rows) {
        auto& line = cells.emplace_back();
        for (std::size_t c = 0; c < row.size(); ++c) {
            line.push_back(render_value(row[c], 6));
            w[c] = std::max(w[c], line.back().size());
        }
    }
    auto emit = [&](const std::vector<std::string>& line) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            out << (c ? "  " : "") << std::string(w[c] - line[c].size(), ' ') << line[c];
        }
        out << "\n";
    };
    emit(r.columns);
    for (const auto& line : cells) emit(line);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw DomainError("cannot write '" + path + "'");
    f << text;
}

OptionKind parse_kind(const std::string& s) {
    if (s == "call" || s == "C" || s == "c") return OptionKind::Call;
    if (s == "put" || s == "P" || s == "p") return OptionKind::Put;
    throw DomainError("kind must be call or put, got '" + s + "'");
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw DomainError("invalid number '" + cell + "' in list '" + s + "'");
        }
    }
    return out;
}

std::vector<double> read_returns_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path + "'");
    std::vector<double> xs;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cell = line.substr(0, line.find(','));
        try {
            xs.push_back(std::stod(cell));
        } catch (const std::exception&) {
            if (!first) throw DomainError("invalid return value '" + cell + "'");
        }
        first = false;
    }
    return xs;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& err) {
    if (seed) return *seed;
    const std::uint64_t s = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^
                            std::random_device{}();
    err << "seed: " << s << "\n";
    return s;
}

}  // namespace

std::string plotdata_histogram(const Histogram& h) {
    require(h.in_range > 0, "plot data: empty histogram");
    require(h.centers.size() > 0, "plot data: empty histogram");
    const double width = h.centers.size() > 1 ? h.centers[1] - h.centers[0] : 1.0;
    std::string s = "log_return,density\n";
    for (std::size_t i = 0; i < h.centers.size(); ++i) {
        if (h.counts[i] == 0) continue;
        const double dens = static_cast<double>(h.counts[i]) / (static_cast<double>(h.in_range) * width);
        s += format_number(h.centers[i], 12) + "," + format_number(dens, 12) + "\n";
    }
    return s;
}

std::string plotdata_smile(std::span<const ReportRow> rows) {
    require(!rows.empty(), "plot data: empty smile");
    std::string s = "strike,implied_vol\n";
    for (const auto& r : rows) s += format_number(r.market.strike, 12) + "," + format_number(r.model_iv, 12) + "\n";
    return s;
}

std::string plotdata_density(const DensityGrid& g) {
    require(!g.x.empty(), "plot data: empty density grid");
    std::string s = "log_return,density\n";
    for (std::size_t i = 0; i < g.x.size(); ++i)
        s += format_number(g.x[i], 12) + "," + format_number(g.values[i], 12) + "\n";
    return s;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Option pricing with exponentially distributed returns"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "text";
    std::string out_path;
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "csv", "json"}))
        ->capture_default_str();
    app.add_option("--out", out_path, "Write output to this file instead of stdout");

    // Shared market inputs.
    struct Market {
        double p0 = 100.0, dt = 1.0, carry = 0.0, rate = 0.0, strike = 0.0;
        std::string kind;
    };

    // price
    Market pm;
    std::string model = "exp", method = "closed";
    double gamma = 0.0, nu = 0.0, alpha = 1.0, sigma = 0.2;
    std::optional<double> delta;
    double b = 1.0, bprime = 1.0, rplus = 0.0, rminus = 0.0;
    auto* price = app.add_subcommand("price", "Price a European option");
    price->add_option("--model", model)->check(CLI::IsMember({"exp", "gauss", "stretched", "dynamic"}))->capture_default_str();
    price->add_option("--method", method)->check(CLI::IsMember({"closed", "quadrature"}))->capture_default_str();
    price->add_option("--p0", pm.p0)->capture_default_str();
    price->add_option("--dt", pm.dt, "Years to expiry")->capture_default_str();
    price->add_option("--carry", pm.carry, "Carry rate c per annum")->capture_default_str();
    price->add_option("--rate", pm.rate, "Discount (hedge) rate R per annum")->capture_default_str();
    price->add_option("--strike", pm.strike)->required();
    price->add_option("--kind", pm.kind)->required();
    price->add_option("--gamma", gamma, "Left tail rate over the horizon");
    price->add_option("--nu", nu, "Right tail rate over the horizon");
    price->add_option("--delta", delta, "Peak location (default: from the carry rate)");
    price->add_option("--alpha", alpha, "Stretched exponent in [1, 2]")->capture_default_str();
    price->add_option("--sigma", sigma, "Gaussian volatility per sqrt-year")->capture_default_str();
    price->add_option("--b", b)->capture_default_str();
    price->add_option("--bprime", bprime)->capture_default_str();
    price->add_option("--rplus", rplus)->capture_default_str();
    price->add_option("--rminus", rminus)->capture_default_str();

    // implied-vol
    Market im;
    double quoted = 0.0;
    auto* iv = app.add_subcommand("implied-vol", "Black implied volatility of a price");
    iv->add_option("--p0", im.p0)->capture_default_str();
    iv->add_option("--dt", im.dt)->capture_default_str();
    iv->add_option("--carry", im.carry)->capture_default_str();
    iv->add_option("--rate", im.rate)->capture_default_str();
    iv->add_option("--strike", im.strike)->required();
    iv->add_option("--kind", im.kind)->required();
    iv->add_option("--price", quoted)->required();

    // calibrate
    std::string quotes_path;
    bool use_table1 = false, freeze_rates = false;
    std::optional<double> cal_p0, cal_dt;
    double rate_init = 0.05, carry_init = 0.0, tic = 1.0 / 64.0, cost = 0.5;
    std::string plot_path;
    auto* cal = app.add_subcommand("calibrate", "Fit gamma, nu (and c, R) to option quotes");
    auto* qopt = cal->add_option("--quotes", quotes_path, "CSV with header strike,kind,price");
    auto* topt = cal->add_flag("--table1", use_table1, "Use the built-in reference futures-option quotes");
    qopt->excludes(topt);
    cal->add_option("--p0", cal_p0);
    cal->add_option("--dt", cal_dt);
    cal->add_option("--rate-init", rate_init)->capture_default_str();
    cal->add_option("--carry-init", carry_init)->capture_default_str();
    cal->add_flag("--freeze-rates", freeze_rates, "Hold c and R at their initial values");
    cal->add_option("--tic", tic)->capture_default_str();
    cal->add_option("--cost", cost, "Transaction cost in tics")->capture_default_str();
    cal->add_option("--plot", plot_path, "Write smile plot data (CSV) here");

    // simulate
    DynParams sp;
    double horizon = 0.25;
    std::size_t paths = 100000;
    int steps = 400;
    std::optional<std::uint64_t> seed;
    std::string noise = "exp", samples_path, density_path;
    unsigned threads = 0;
    bool run_fp = false;
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo paths of the singular-volatility model");
    sim->add_option("--b", sp.b)->capture_default_str();
    sim->add_option("--bprime", sp.b_prime)->capture_default_str();
    sim->add_option("--alpha", sp.alpha)->capture_default_str();
    sim->add_option("--rplus", sp.r_plus)->capture_default_str();
    sim->add_option("--rminus", sp.r_minus)->capture_default_str();
    sim->add_option("--t", horizon, "Horizon in years")->capture_default_str();
    sim->add_option("--paths", paths)->capture_default_str();
    sim->add_option("--steps", steps)->capture_default_str();
    sim->add_option("--seed", seed);
    sim->add_option("--noise", noise)->check(CLI::IsMember({"exp", "gauss"}))->capture_default_str();
    sim->add_option("--threads", threads, "0 = EXPOPT_THREADS or all cores")->capture_default_str();
    sim->add_option("--samples", samples_path, "Write terminal log-returns here (CSV)");
    sim->add_option("--plot", plot_path, "Write histogram plot data (CSV) here");
    sim->add_flag("--fokker-planck", run_fp, "Also evolve the Fokker-Planck equation and compare");
    sim->add_option("--density", density_path, "Write the Fokker-Planck density plot data here");

    // fit-returns
    std::string series_path, returns_path;
    std::size_t lag = 1;
    auto* fit = app.add_subcommand("fit-returns", "Fit the two-sided exponential to log-returns");
    auto* sopt = fit->add_option("--series", series_path, "CSV with header timestamp,price");
    auto* ropt = fit->add_option("--returns", returns_path, "CSV whose first column holds log-returns");
    sopt->excludes(ropt);
    fit->add_option("--lag", lag)->capture_default_str();
    fit->add_option("--plot", plot_path, "Write histogram plot data (CSV) here");

    // capm
    std::string sigma_text, excess_text;
    double r0 = 0.0;
    auto* capm = app.add_subcommand("capm", "Efficient portfolio of correlated assets");
    capm->add_option("--sigma", sigma_text, "Covariance rows separated by ';', entries by ','")->required();
    capm->add_option("--excess", excess_text, "Excess returns R_i - R_0, comma separated")->required();
    capm->add_option("--r0", r0)->capture_default_str();

    // table1
    std::string convention = "annual";
    double days_per_year = 365.0;
    bool fit_exponents = false;
    auto* t1 = app.add_subcommand("table1", "Compare the model with the reference market-vs-model option table");
    t1->add_option("--exponents", convention, "Read the reference gamma, nu per sqrt-year or per horizon")
        ->check(CLI::IsMember({"annual", "horizon"}))
        ->capture_default_str();
    t1->add_option("--days-per-year", days_per_year)->capture_default_str();
    t1->add_option("--tic", tic)->capture_default_str();
    t1->add_option("--cost", cost)->capture_default_str();
    t1->add_flag("--fit-exponents", fit_exponents, "Fit gamma and nu too instead of using the reference values");
    t1->add_option("--plot", plot_path, "Write smile plot data (CSV) here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        Report rep;
        if (*price) {
            PricingContext ctx{pm.p0, pm.rate, pm.carry, pm.dt, 1.0 / 64.0};
            const OptionKind kind = parse_kind(pm.kind);
            double value = 0.0;
            rep.add("model", model);
            if (model == "gauss") {
                value = method == "closed" ? bs_price(ctx, {sigma}, pm.strike, kind)
                                           : bs_price_quadrature(ctx, {sigma}, pm.strike, kind);
            } else if (model == "stretched") {
                StretchedParams p{alpha, gamma, nu, delta.value_or(0.0)};
                value = method == "quadrature" || kind == OptionKind::Put
                            ? stretched_price_quadrature(ctx, p, pm.strike, kind)
                            : stretched_call_incomplete_gamma(ctx, p, pm.strike);
                rep.add("delta", p.delta);
            } else {
                require(nu > 1.0, "nu must exceed 1: the pricing integrals diverge for nu <= 1 (got nu = " +
                                      format_number(nu, 6) + ")");
                ExpPriceInputs in{ctx, {gamma, nu, 0.0}, pm.strike};
                in.params.delta = delta ? *delta : delta_from_carry(pm.carry, pm.dt, gamma, nu);
                rep.add("delta", in.params.delta);
                if (model == "exp") {
                    value = method == "closed" ? exp_price_closed(in, kind) : exp_price_quadrature(in, kind);
                } else {
                    DynParams dp{b, bprime, rplus, rminus, pm.rate, 1.0};
                    const auto shifts = dynamic_shifts(dp, gamma, nu);
                    value = method == "closed" ? dynamic_price(in, dp, kind)
                                               : dynamic_price_quadrature(in, shifts, pm.rate, kind);
                    rep.add("shift_plus", shifts.plus);
                    rep.add("shift_minus", shifts.minus);
                }
            }
            rep.add("kind", std::string(to_string(kind)));
            rep.add("strike", pm.strike);
            rep.add("price", value);
        } else if (*iv) {
            PricingContext ctx{im.p0, im.rate, im.carry, im.dt, 1.0 / 64.0};
            const OptionKind kind = parse_kind(im.kind);
            rep.add("kind", std::string(to_string(kind)));
            rep.add("strike", im.strike);
            rep.add("price", quoted);
            rep.add("implied_vol", implied_vol(ctx, im.strike, kind, quoted));
        } else if (*cal) {
            require(use_table1 || !quotes_path.empty(), "calibrate needs --quotes FILE or --table1");
            const auto quotes = use_table1 ? table1::quotes() : read_quotes_csv(quotes_path);
            const double p0 = cal_p0.value_or(use_table1 ? table1::kFutures : 0.0);
            const double dt = cal_dt.value_or(use_table1 ? table1::dt() : 0.0);
            require(p0 > 0.0, "calibrate needs --p0");
            require(dt > 0.0, "calibrate needs --dt");
            CalibrationOptions opts;
            opts.fit_rates = !freeze_rates;
            const auto res = calibrate(quotes, p0, dt, rate_init, carry_init, opts);
            rep.add("gamma", res.gamma);
            rep.add("nu", res.nu);
            rep.add("gamma_annual", res.gamma_annual);
            rep.add("nu_annual", res.nu_annual);
            rep.add("delta", res.delta);
            rep.add("carry", res.carry);
            rep.add("rate", res.discount);
            rep.add("rms_fractional_deviation", res.rms_fractional_deviation);
            rep.add("anchors", static_cast<long long>(res.anchors.size()));
            rep.add("converged", std::string(res.converged ? "yes" : "no"));
            PricingContext ctx{p0, res.discount, res.carry, dt, tic};
            const auto rows = table_report(quotes, res, ctx, cost);
            rep.columns = {"strike", "kind", "market", "market_iv", "model_raw", "model", "model_iv"};
            for (const auto& r : rows) {
                rep.rows.push_back({r.market.strike, std::string(to_string(r.market.kind)), r.market.price,
                                    r.market_iv, r.model_raw, r.model_price, r.model_iv});
            }
            if (!plot_path.empty()) write_text_file(plot_path, plotdata_smile(rows));
        } else if (*sim) {
            const std::uint64_t s = resolve_seed(seed, err);
            SimulationOptions so;
            so.noise = noise == "gauss" ? NoiseKind::Gaussian : NoiseKind::TwoSidedExponential;
            so.threads = threads;
            const auto ens = simulate_returns(sp, horizon, paths, steps, s, so);
            const auto& xs = ens.samples;
            double mean = 0.0;
            for (double x : xs) mean += x;
            mean /= static_cast<double>(xs.size());
            double var = 0.0;
            for (double x : xs) var += (x - mean) * (x - mean);
            var /= static_cast<double>(xs.size() > 1 ? xs.size() - 1 : 1);
            const auto pred = predicted_exponents(sp.b, sp.b_prime, horizon);
            rep.add("seed", static_cast<long long>(s));
            rep.add("paths", static_cast<long long>(paths));
            rep.add("steps", static_cast<long long>(steps));
            rep.add("horizon", horizon);
            rep.add("noise", noise);
            rep.add("mean", mean);
            rep.add("variance", var);
            rep.add("predicted_variance", (sp.b * sp.b + sp.b_prime * sp.b_prime) * horizon);
            rep.add("predicted_gamma", pred.gamma);
            rep.add("predicted_nu", pred.nu);
            if (xs.size() >= 50) {
                const auto f = fit_two_sided_exponential(xs);
                rep.add("gamma_hat", f.gamma);
                rep.add("nu_hat", f.nu);
                rep.add("delta_hat", f.delta);
            }
            if (run_fp) {
                const auto init = initial_density_grid(sp, horizon);
                const auto fp = fokker_planck_evolve(init, sp, horizon);
                rep.add("fp_steps", static_cast<long long>(fp.steps));
                rep.add("fp_max_mass_error", fp.max_mass_error);
                rep.add("fp_ks_distance", ks_distance(fp.density, xs));
                if (!density_path.empty()) write_text_file(density_path, plotdata_density(fp.density));
            }
            if (!samples_path.empty()) {
                std::string text = "x\n";
                for (double x : xs) text += format_number(x, 12) + "\n";
                write_text_file(samples_path, text);
            }
            if (!plot_path.empty()) write_text_file(plot_path, plotdata_histogram(build_histogram(xs)));
        } else if (*fit) {
            require(!series_path.empty() || !returns_path.empty(), "fit-returns needs --series or --returns");
            const auto xs = !series_path.empty() ? log_returns(read_series_csv(series_path), lag)
                                                 : read_returns_file(returns_path);
            const auto f = fit_two_sided_exponential(xs);
            rep.add("samples", static_cast<long long>(xs.size()));
            rep.add("gamma", f.gamma);
            rep.add("nu", f.nu);
            rep.add("delta", f.delta);
            rep.add("loglik", f.loglik);
            const auto c = sample_consistency_report(xs, f.delta);
            rep.add("variance", c.var);
            rep.add("variance_defect", c.variance_defect);
            rep.add("spread_defect", c.spread_defect);
            if (!plot_path.empty()) write_text_file(plot_path, plotdata_histogram(build_histogram(xs)));
        } else if (*capm) {
            std::vector<std::vector<double>> rows;
            std::stringstream ss(sigma_text);
            std::string row;
            while (std::getline(ss, row, ';')) rows.push_back(parse_list(row));
            const auto ex = parse_list(excess_text);
            const auto n = static_cast<Eigen::Index>(ex.size());
            require(static_cast<Eigen::Index>(rows.size()) == n, "sigma must have one row per asset");
            CapmInputs in;
            in.sigma.resize(n, n);
            in.excess_returns.resize(n);
            in.r0 = r0;
            for (Eigen::Index i = 0; i < n; ++i) {
                require(static_cast<Eigen::Index>(rows[i].size()) == n, "sigma must be square");
                for (Eigen::Index j = 0; j < n; ++j) in.sigma(i, j) = rows[i][j];
                in.excess_returns(i) = ex[i];
            }
            const auto f = efficient_weights(in);
            const double var = portfolio_variance(in.sigma, f);
            const double dre = f.dot(in.excess_returns);
            rep.add("portfolio_variance", var);
            rep.add("portfolio_excess_return", dre);
            rep.add("portfolio_return", r0 + dre);
            rep.columns = {"asset", "weight", "beta", "capm_return"};
            const Eigen::VectorXd cov = in.sigma * f;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double beta = asset_beta(cov(i), var);
                rep.rows.push_back({static_cast<long long>(i + 1), f(i), beta, capm_return(beta, dre, r0)});
            }
        } else if (*t1) {
            const double dt = table1::dt(days_per_year);
            const double scale = convention == "annual" ? 1.0 / std::sqrt(dt) : 1.0;
            const auto quotes = table1::quotes();
            CalibrationOptions opts;
            if (!fit_exponents) opts.fixed_exponents = std::make_pair(table1::kGamma * scale, table1::kNu * scale);
            const auto res = calibrate(quotes, table1::kFutures, dt, 0.05, 0.0, opts);
            PricingContext ctx{table1::kFutures, res.discount, res.carry, dt, tic};
            const auto rows = table_report(quotes, res, ctx, cost);
            int within = 0, compared = 0;
            rep.columns = {"strike", "kind", "market", "market_iv", "ref_model", "ref_iv",
                           "model", "model_iv", "within_tic"};
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const auto& ref = table1::rows()[i];
                const bool ok = std::abs(rows[i].model_price - ref.computed_price) <= tic * (1.0 + 1e-9);
                if (!ref.suspect) {
                    ++compared;
                    within += ok ? 1 : 0;
                }
                rep.rows.push_back({ref.market.strike, std::string(to_string(ref.market.kind)),
                                    ref.market.price, rows[i].market_iv, ref.computed_price,
                                    ref.computed_iv, rows[i].model_price, rows[i].model_iv,
                                    std::string(ref.suspect ? "excluded" : (ok ? "yes" : "no"))});
            }
            rep.add("gamma", res.gamma);
            rep.add("nu", res.nu);
            rep.add("gamma_annual", res.gamma_annual);
            rep.add("nu_annual", res.nu_annual);
            rep.add("carry", res.carry);
            rep.add("rate", res.discount);
            rep.add("anchor_rms", res.rms_fractional_deviation);
            rep.add("rows_within_tic", static_cast<long long>(within));
            rep.add("rows_compared", static_cast<long long>(compared));
            if (!plot_path.empty()) write_text_file(plot_path, plotdata_smile(rows));
        }

        if (out_path.empty()) {
            render(rep, format, out);
        } else {
            std::ostringstream buf;
            render(rep, format, buf);
            write_text_file(out_path, buf.str());
        }
        return 0;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace expopt::cli
