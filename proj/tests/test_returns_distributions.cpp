#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "expopt/errors.hpp"
#include "expopt/returns_distributions.hpp"
#include "oracles.hpp"

using namespace expopt;

TEST_CASE("exp_density peak and symmetric unit case") {
    const ExpParams p{10.96, 16.76, 0.03};
    CHECK(exp_density(p.delta, p) == doctest::Approx(p.gamma * p.nu / (p.gamma + p.nu)));
    CHECK(exp_density(0.0, {2.0, 2.0, 0.0}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(exp_density(0.0, {0.0, 1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(exp_density(0.0, {1.0, -1.0, 0.0}), DomainError);
}

TEST_CASE("exp_density normalization on the property grid") {
    const ExpParams t1{10.96, 16.76, 0.0};
    const double m = oracle::finite([&](double x) { return exp_density(x, t1); }, -3.0, 0.0) +
                     oracle::finite([&](double x) { return exp_density(x, t1); }, 0.0, 3.0);
    CHECK(m == doctest::Approx(1.0).epsilon(1e-10));
    for (double g : {0.5, 1.0, 5.0, 50.0, 500.0}) {
        for (double n : {0.5, 1.0, 5.0, 50.0, 500.0}) {
            for (double d : {-0.1, 0.0, 0.1}) {
                const ExpParams p{g, n, d};
                auto f = [&](double x) { return exp_density(x, p); };
                const double mass = oracle::lower(f, d) + oracle::upper(f, d);
                CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("price_density Jacobian identity and normalization") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const ExpParams p{0.5 + 50 * u(rng), 0.5 + 50 * u(rng), -0.2 + 0.4 * u(rng)};
        const double y = 0.2 + 3.0 * u(rng);
        CHECK(price_density(y, p) == doctest::Approx(exp_density(std::log(y), p) / y).epsilon(1e-12));
    }
    const ExpParams p{5.0, 5.0, 0.0};
    CHECK(price_density(std::exp(0.0), p) == doctest::Approx(p.normalization()));
    auto f = [&](double y) { return price_density(y, p); };
    const double mass = oracle::finite(f, 0.0, 1.0) + oracle::upper(f, 1.0);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(price_density(0.0, p), DomainError);
}

TEST_CASE("exp_moments closed forms") {
    const auto m = exp_moments({5.0, 5.0, 0.0});
    CHECK(m.mean == doctest::Approx(0.0));
    CHECK(m.mean_plus == doctest::Approx(0.2));
    CHECK(m.mean_minus == doctest::Approx(-0.2));
    CHECK(m.var == doctest::Approx(0.08));
    const auto t = exp_moments({10.96, 16.76, 0.0});
    CHECK(t.mean == doctest::Approx((10.96 - 16.76) / (10.96 * 16.76)).epsilon(1e-14));
    CHECK(t.mean == doctest::Approx(-0.03158).epsilon(1e-3));
    CHECK(t.mean_plus - t.mean_minus == doctest::Approx(std::sqrt(t.var_plus) + std::sqrt(t.var_minus)));
    CHECK(t.var == doctest::Approx(t.var_plus + t.var_minus));
}

TEST_CASE("exp_moments agree with quadrature of conditional integrals") {
    for (double g : {0.5, 5.0, 50.0}) {
        for (double n : {1.0, 5.0, 500.0}) {
            for (double d : {-0.1, 0.0, 0.1}) {
                const ExpParams p{g, n, d};
                const auto m = exp_moments(p);
                auto dens = [&](double x) { return exp_density(x, p); };
                const double wp = oracle::upper(dens, d);
                const double wm = oracle::lower(dens, d);
                const double mp = oracle::upper([&](double x) { return x * dens(x); }, d) / wp;
                const double mm = oracle::lower([&](double x) { return x * dens(x); }, d) / wm;
                const double vp = oracle::upper([&](double x) { return (x - mp) * (x - mp) * dens(x); }, d) / wp;
                const double vm = oracle::lower([&](double x) { return (x - mm) * (x - mm) * dens(x); }, d) / wm;
                const double mean = mp * wp + mm * wm;
                const double var = oracle::upper([&](double x) { return (x - mean) * (x - mean) * dens(x); }, d) +
                                   oracle::lower([&](double x) { return (x - mean) * (x - mean) * dens(x); }, d);
                CHECK(std::abs(m.mean_plus - mp) <= 1e-9 * std::max(1.0, std::abs(mp)));
                CHECK(std::abs(m.mean_minus - mm) <= 1e-9 * std::max(1.0, std::abs(mm)));
                CHECK(std::abs(m.mean - mean) <= 1e-9 * std::max(1.0, std::abs(mean)));
                CHECK(m.var_plus == doctest::Approx(vp).epsilon(1e-9));
                CHECK(m.var_minus == doctest::Approx(vm).epsilon(1e-9));
                CHECK(m.var == doctest::Approx(var).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("delta_from_carry") {
    CHECK(std::abs(delta_from_carry(0.0, 1.0, 1e9, 1e9)) <= 1e-8);
    CHECK(delta_from_carry(0.0, 1.0, 10.0, 10.0) == doctest::Approx(std::log(0.99)).epsilon(1e-14));
    CHECK(delta_from_carry(0.0, 1.0, 10.0, 10.0) == doctest::Approx(-0.010050).epsilon(1e-4));
    const double d = delta_from_carry(0.05, 0.5, 10.0, 15.0);
    const ExpParams p{10.0, 15.0, d};
    auto f = [&](double x) { return std::exp(x) * exp_density(x, p); };
    const double m = oracle::lower(f, d) + oracle::upper(f, d);
    CHECK(m == doctest::Approx(std::exp(0.025)).epsilon(1e-9));
    CHECK_THROWS_AS(delta_from_carry(0.0, 1.0, 10.0, 1.0), DomainError);
    CHECK_THROWS_AS(delta_from_carry(0.0, 1.0, 10.0, 0.5), DomainError);
}

TEST_CASE("delta_from_carry round trip on a grid") {
    for (double g : {2.0, 10.96, 50.0}) {
        for (double n : {1.5, 16.76, 80.0}) {
            for (double c : {-0.03, 0.0, 0.08}) {
                const double dt = 0.3;
                const ExpParams p{g, n, delta_from_carry(c, dt, g, n)};
                auto f = [&](double x) { return std::exp(x) * exp_density(x, p); };
                const double m = oracle::lower(f, p.delta) + oracle::upper(f, p.delta);
                CHECK(m == doctest::Approx(std::exp(c * dt)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("sample_consistency_report") {
    const auto xs = sample_exp({5.0, 5.0, 0.0}, 100000, 11);
    const auto r = sample_consistency_report(xs, 0.0);
    CHECK(r.variance_defect < 0.05);
    CHECK(r.spread_defect < 0.05);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 0.1);
    std::vector<double> gs(100000);
    for (auto& x : gs) x = g(rng);
    const auto rg = sample_consistency_report(gs, 0.0);
    // For a Gaussian, sd+ + sd- = 2 sigma sqrt(1 - 2/pi) while mean+ - mean- = 2 sigma sqrt(2/pi).
    const double expected = std::abs(std::sqrt(1.0 - 2.0 / M_PI) - std::sqrt(2.0 / M_PI)) / std::sqrt(2.0 / M_PI);
    CHECK(rg.spread_defect == doctest::Approx(expected).epsilon(0.05));
    CHECK(rg.spread_defect > 0.2);
    CHECK(rg.variance_defect > 0.2);

    std::vector<double> pos(100, 1.0);
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] += 0.01 * static_cast<double>(i);
    CHECK_THROWS_AS(sample_consistency_report(pos, 0.0), DomainError);
}

TEST_CASE("build_histogram") {
    const std::vector<double> one{0.1};
    auto h = build_histogram(one, {0.2, 0.0, 0.2});
    REQUIRE(h.counts.size() == 1);
    CHECK(h.counts[0] == 1);
    const std::vector<double> three{-0.1, 0.1, 0.1};
    h = build_histogram(three, {0.2, -0.2, 0.2});
    REQUIRE(h.counts.size() == 2);
    CHECK(h.counts[0] == 1);
    CHECK(h.counts[1] == 2);
    CHECK(h.log_frequencies[1] == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(build_histogram(std::vector<double>{}, {0.2, -0.2, 0.2}), DomainError);
    CHECK_THROWS_AS(build_histogram(three, {0.0, -0.2, 0.2}), DomainError);
}

TEST_CASE("histogram slopes recover tail rates") {
    const auto xs = sample_exp({500.0, 500.0, 0.0}, 1000000, 17);
    const auto h = build_histogram(xs, {0.0005, -0.012, 0.012});
    auto slope = [&](bool plus) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (std::size_t i = 0; i < h.log_centers.size(); ++i) {
            const double x = h.log_centers[i];
            if (plus ? x < 0.0005 : x > -0.0005) continue;
            if (h.log_frequencies[i] < std::log(30.0)) continue;
            sx += x;
            sy += h.log_frequencies[i];
            sxx += x * x;
            sxy += x * h.log_frequencies[i];
            ++n;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    CHECK(slope(true) == doctest::Approx(-500.0).epsilon(0.03));
    CHECK(slope(false) == doctest::Approx(500.0).epsilon(0.03));
}

TEST_CASE("trading-hour conventions") {
    CHECK(hours_to_years(2916.0) == doctest::Approx(1.0));
    CHECK(hours_to_years(9.0) == doctest::Approx(1.0 / 324.0));
}
