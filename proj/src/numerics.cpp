#include "expopt/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "expopt/errors.hpp"

namespace expopt::numerics {

namespace {

// Kronrod 15-point nodes/weights and the embedded Gauss 7-point weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
    if (a == b) return {};
    if (!(std::isfinite(a) && std::isfinite(b))) {
        throw DomainError("integrate: bounds must be finite");
    }
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::priority_queue<Segment> heap;
    Segment first = gk15(f, a, b);
    double total = first.value;
    double err = first.error;
    heap.push(first);
    int n = 1;
    while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (n >= opts.max_intervals) break;
        Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) break;  // interval exhausted
        heap.pop();
        Segment left = gk15(f, worst.a, mid);
        Segment right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++n;
    }
    // Resum to avoid drift from the running updates.
    double value = 0.0;
    double error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {sign * value, error, n};
}

QuadratureResult integrate_pieces(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints,
                                  const QuadratureOptions& opts) {
    QuadratureResult out;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (breakpoints[i + 1] <= breakpoints[i]) continue;
        auto r = integrate(f, breakpoints[i], breakpoints[i + 1], opts);
        out.value += r.value;
        out.error += r.error;
        out.intervals += r.intervals;
    }
    return out;
}

namespace {

// Series for P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    require(a > 0.0, "gamma_p: a must be positive");
    require(x >= 0.0, "gamma_p: x must be non-negative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) {
    require(a > 0.0, "gamma_q: a must be positive");
    require(x >= 0.0, "gamma_q: x must be non-negative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

double upper_incomplete_gamma(double a, double x) { return gamma_q(a, x) * std::tgamma(a); }

SimplexResult minimize_simplex(const std::function<double(std::span<const double>)>& f,
                               std::vector<double> x0, const SimplexOptions& opts,
                               std::span<const double> lower, std::span<const double> upper) {
    const std::size_t n = x0.size();
    require(n > 0, "minimize_simplex: empty starting point");
    const bool bounded = !lower.empty();
    require(!bounded || (lower.size() == n && upper.size() == n),
            "minimize_simplex: bound dimensions mismatch");

    auto clamp = [&](std::vector<double>& x) {
        if (!bounded) return;
        for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    };
    auto eval = [&](std::vector<double>& x) {
        clamp(x);
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };

    SimplexResult best;
    best.x = x0;
    clamp(best.x);
    best.value = eval(best.x);

    for (int round = 0; round <= opts.restarts; ++round) {
        std::vector<std::vector<double>> pts(n + 1, best.x);
        std::vector<double> vals(n + 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double step = best.x[i] != 0.0 ? opts.initial_step * std::abs(best.x[i])
                                                 : opts.initial_step;
            pts[i + 1][i] += step;
            if (bounded && pts[i + 1][i] > upper[i]) pts[i + 1][i] = best.x[i] - step;
        }
        for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

        std::vector<std::size_t> order(n + 1);
        int it = 0;
        bool converged = false;
        for (; it < opts.max_iterations; ++it) {
            for (std::size_t i = 0; i <= n; ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t l, std::size_t r) { return vals[l] < vals[r]; });
            const std::size_t lo = order.front();
            const std::size_t hi = order.back();
            const std::size_t nh = order[n - 1];

            double spread = 0.0;
            for (std::size_t i = 0; i <= n; ++i) {
                for (std::size_t k = 0; k < n; ++k) {
                    spread = std::max(spread, std::abs(pts[i][k] - pts[lo][k]));
                }
            }
            if (std::abs(vals[hi] - vals[lo]) <= opts.f_tol && spread <= opts.x_tol) {
                converged = true;
                break;
            }

            std::vector<double> centroid(n, 0.0);
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == hi) continue;
                for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / n;
            }
            auto along = [&](double t) {
                std::vector<double> p(n);
                for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + t * (pts[hi][k] - centroid[k]);
                return p;
            };

            auto xr = along(-1.0);
            const double fr = eval(xr);
            if (fr < vals[lo]) {
                auto xe = along(-2.0);
                const double fe = eval(xe);
                if (fe < fr) {
                    pts[hi] = xe;
                    vals[hi] = fe;
                } else {
                    pts[hi] = xr;
                    vals[hi] = fr;
                }
            } else if (fr < vals[nh]) {
                pts[hi] = xr;
                vals[hi] = fr;
            } else {
                const bool outside = fr < vals[hi];
                auto xc = along(outside ? -0.5 : 0.5);
                const double fc = eval(xc);
                if (fc < std::min(fr, vals[hi])) {
                    pts[hi] = xc;
                    vals[hi] = fc;
                } else {
                    for (std::size_t i = 0; i <= n; ++i) {
                        if (i == lo) continue;
                        for (std::size_t k = 0; k < n; ++k) {
                            pts[i][k] = pts[lo][k] + 0.5 * (pts[i][k] - pts[lo][k]);
                        }
                        vals[i] = eval(pts[i]);
                    }
                }
            }
        }
        const auto lo = static_cast<std::size_t>(
            std::min_element(vals.begin(), vals.end()) - vals.begin());
        best.iterations += it;
        const bool improved = vals[lo] < best.value;
        if (vals[lo] <= best.value) {
            best.x = pts[lo];
            best.value = vals[lo];
        }
        best.converged = converged;
        if (converged && !improved && round > 0) break;
    }
    return best;
}

}  // namespace expopt::numerics
