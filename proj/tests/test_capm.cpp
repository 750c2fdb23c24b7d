#include <doctest.h>

#include <cmath>
#include <random>

#include "expopt/capm.hpp"
#include "expopt/errors.hpp"

using namespace expopt;

namespace {

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    return a * a.transpose() / n + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

// Oracle: minimize f' S f subject to f . dR = target and sum f = 1 through the
// KKT system, then pick the target that maximizes the Sharpe ratio by a scan.
Eigen::VectorXd kkt_min_variance(const Eigen::MatrixXd& s, const Eigen::VectorXd& dr, double target) {
    const int n = static_cast<int>(s.rows());
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + 2, n + 2);
    k.topLeftCorner(n, n) = 2.0 * s;
    k.block(0, n, n, 1) = dr;
    k.block(0, n + 1, n, 1) = Eigen::VectorXd::Ones(n);
    k.block(n, 0, 1, n) = dr.transpose();
    k.block(n + 1, 0, 1, n) = Eigen::RowVectorXd::Ones(n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 2);
    rhs(n) = target;
    rhs(n + 1) = 1.0;
    return k.fullPivLu().solve(rhs).head(n);
}

}  // namespace

TEST_CASE("efficient weights trivial cases") {
    CapmInputs one{Eigen::MatrixXd::Constant(1, 1, 0.04), Eigen::VectorXd::Constant(1, 0.05), 0.02};
    CHECK(efficient_weights(one)(0) == doctest::Approx(1.0));
    CapmInputs two{Eigen::Matrix2d::Identity() * 0.04, Eigen::Vector2d(0.05, 0.05), 0.02};
    const auto f = efficient_weights(two);
    CHECK(f(0) == doctest::Approx(0.5));
    CHECK(f(1) == doctest::Approx(0.5));
    CapmInputs bad{Eigen::Matrix2d::Zero(), Eigen::Vector2d(0.05, 0.05), 0.0};
    CHECK_THROWS_AS(efficient_weights(bad), DomainError);
}

TEST_CASE("efficient weights match the constrained-minimization oracle") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.01, 0.1);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 4;
        CapmInputs in{random_spd(rng, n), Eigen::VectorXd(n), 0.02};
        for (int i = 0; i < n; ++i) in.excess_returns(i) = u(rng);
        const auto f = efficient_weights(in);
        CHECK(f.sum() == doctest::Approx(1.0));
        if (n == 1) continue;
        // The tangency portfolio is the minimum-variance portfolio for its own return.
        const double target = f.dot(in.excess_returns);
        const auto o = kkt_min_variance(in.sigma, in.excess_returns, target);
        CHECK((f - o).cwiseAbs().maxCoeff() <= 1e-6);
        // No feasible perturbation lowers the variance at that return.
        const double v0 = portfolio_variance(in.sigma, f);
        std::normal_distribution<double> g(0.0, 1.0);
        Eigen::MatrixXd c(2, n);
        c.row(0) = in.excess_returns.transpose();
        c.row(1) = Eigen::RowVectorXd::Ones(n);
        const Eigen::MatrixXd null = c.fullPivLu().kernel();
        for (int d = 0; d < 20 && null.cols() > 0 && null.norm() > 0; ++d) {
            Eigen::VectorXd w(null.cols());
            for (int j = 0; j < w.size(); ++j) w(j) = g(rng);
            Eigen::VectorXd dir = null * w;
            dir /= dir.norm();
            CHECK(portfolio_variance(in.sigma, f + 1e-3 * dir) >= v0 - 1e-15);
        }
    }
}

TEST_CASE("two_asset_ratio") {
    CHECK(two_asset_ratio(0.04, 0.0, 0.04, 0.05, 0.05) == doctest::Approx(1.0));
    CHECK(two_asset_ratio(0.04, 0.0, 0.09, 0.0, 0.05) == doctest::Approx(0.0));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.01, 0.1);
    for (int i = 0; i < 50; ++i) {
        CapmInputs in{random_spd(rng, 2), Eigen::Vector2d(u(rng), u(rng)), 0.0};
        const auto f = efficient_weights(in);
        const double r = two_asset_ratio(in.sigma(0, 0), in.sigma(0, 1), in.sigma(1, 1), in.excess_returns(0),
                                         in.excess_returns(1));
        CHECK(r == doctest::Approx(f(0) / f(1)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(two_asset_ratio(1.0, 1.0, 1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("beta and capm return") {
    CHECK(asset_beta(0.04, 0.04) == doctest::Approx(1.0));
    CHECK(capm_return(1.0, 0.04, 0.03) == doctest::Approx(0.07));
    CHECK(capm_return(0.0, 0.04, 0.03) == doctest::Approx(0.03));
    CHECK(capm_return(asset_beta(0.08, 0.04), 0.04, 0.03) == doctest::Approx(0.11));
}

TEST_CASE("capm fractions") {
    HedgeState h;
    h.elasticity = 2.0;
    h.beta1 = 1.0;
    h.beta2 = 2.0;
    auto [f1, f2] = capm_fractions(h);
    CHECK(f2 == 0.0);
    h.beta2 = 3.0;
    std::tie(f1, f2) = capm_fractions(h);
    CHECK(f2 == doctest::Approx(1.0));
    CHECK(f1 == doctest::Approx(-2.0));
    for (double r : {0.3, 1.7, 5.0}) {
        h.elasticity = r;
        h.beta2 = 0.4;
        std::tie(f1, f2) = capm_fractions(h);
        CHECK(f1 / f2 == doctest::Approx(-r));
    }
}

TEST_CASE("exact two-by-two solve of the hedge portfolio") {
    // sigma12 = r s11, sigma22 = r^2 s11 + q, dR_i = beta_i dRe with the
    // efficient portfolio built from these two assets.
    HedgeState h;
    h.p = 100;
    h.w = 5;
    h.elasticity = 4.0;
    h.beta1 = 1.2;
    h.beta2 = 3.1;
    h.sigma1 = 0.2 * std::sqrt(1.0 / 52);
    h.w_second = 0.03;
    h.dt = 1.0 / 52;
    h.noise = NoiseLaw::TwoSidedExponential;
    const double s11 = h.sigma1 * h.sigma1 / h.dt;
    const double curv = h.w_second * h.sigma1 * h.sigma1 * h.p * h.p / (2 * h.w);
    const double q = curv * curv * 5.0;
    Eigen::Matrix2d s;
    s << s11, h.elasticity * s11, h.elasticity * s11, h.elasticity * h.elasticity * s11 + q;
    const Eigen::Vector2d dr(h.beta1, h.beta2);
    const Eigen::Vector2d f = s.ldlt().solve(dr);
    const auto [f1, f2] = capm_fractions(h, false);
    CHECK(f1 / f2 == doctest::Approx(f(0) / f(1)).epsilon(1e-10));
}

TEST_CASE("hedge statistics") {
    HedgeState h;
    h.elasticity = 2.0;
    h.beta1 = 1.0;
    h.beta2 = 2.0;
    h.delta_re = 0.05;
    auto s = hedge_stats(h);
    CHECK(s.excess_return == 0.0);
    CHECK(s.hedge_beta == 0.0);
    h.beta2 = 0.0;
    s = hedge_stats(h);
    CHECK(s.hedge_beta == doctest::Approx(2.0));
    CHECK(s.excess_return != 0.0);
    h.sigma1 = 0.2;
    h.p = 100;
    h.w_second = 0.01;
    h.dt = 1.0 / 252;
    h.noise = NoiseLaw::Gaussian;
    s = hedge_stats(h);
    const double half = 0.04 * 1e4 * 0.01 / (2 * 252.0);
    CHECK(s.residual_variance == doctest::Approx(half * half * 2.0));
    h.noise = NoiseLaw::TwoSidedExponential;
    CHECK(hedge_stats(h).residual_variance == doctest::Approx(half * half * 5.0));
    h.elasticity = 1.0;
    CHECK_THROWS_AS(hedge_stats(h), DomainError);
    CHECK(fourth_moment(NoiseLaw::Gaussian) == 3.0);
    CHECK(fourth_moment(NoiseLaw::TwoSidedExponential) == 6.0);
}

TEST_CASE("pde gap") {
    PricingContext ctx{100.0, 0.05, 0.05, 1.0, 1.0 / 64};
    const GaussParams g{0.2};
    PriceSurface w = [&](double p, double t) {
        PricingContext c = ctx;
        c.p0 = p;
        c.dt = 1.0 - t;
        return bs_price(c, g, 100.0, OptionKind::Call);
    };
    const auto same = pde_gap(ctx, 0.05, 0.05, g, w, 100.0, 0.3);
    CHECK(std::abs(same.gap) <= 1e-12);
    const auto diff = pde_gap(ctx, 0.07, 0.05, g, w, 100.0, 0.3);
    const double hp = 1e-2;
    const double wp = (w(100 + hp, 0.3) - w(100 - hp, 0.3)) / (2 * hp);
    CHECK(diff.gap == doctest::Approx(-0.02 * 100.0 * wp).epsilon(1e-6));
    PriceSurface flat = [](double, double) { return 3.0; };
    CHECK(pde_gap(ctx, 0.05, 0.08, g, flat, 100.0, 0.3).gap == doctest::Approx(0.03 * 3.0));
    CHECK(std::abs(pde_gap(ctx, 0.05, 0.05, g, flat, 100.0, 0.3).gap) <= 1e-15);
    PriceSurface broken = [](double, double) { return std::nan(""); };
    CHECK_THROWS_AS(pde_gap(ctx, 0.05, 0.05, g, broken, 100.0, 0.3), NumericalError);
}
