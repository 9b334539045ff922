#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>

#include "oracles.hpp"
#include "polar/polar.hpp"

using namespace polar;

TEST(Stats, OneSampleHandCase) {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    const auto r = stats::one_sample_ttest(x, 0.0);
    // mean 3, sd sqrt(2.5), t = 3 / (sqrt(2.5)/sqrt(5)) = 3 sqrt(2)
    EXPECT_NEAR(r.t, 3.0 * std::sqrt(2.0), 1e-12);
    EXPECT_EQ(r.df, 4.0);
    EXPECT_NEAR(r.p, oracle::two_sided(r.t, 4.0), 1e-12);
    EXPECT_NEAR(r.p, 0.013236, 1e-6);
}

TEST(Stats, IncompleteBetaMatchesBoost) {
    Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
        const double a = 0.05 + 50 * rng.uniform(), b = 0.05 + 50 * rng.uniform(), x = rng.uniform();
        EXPECT_NEAR(stats::incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-12) << a << " " << b << " " << x;
    }
    EXPECT_EQ(stats::incomplete_beta(2, 3, 0.0), 0.0);
    EXPECT_EQ(stats::incomplete_beta(2, 3, 1.0), 1.0);
}

TEST(Stats, TwoSidedPMatchesBoost) {
    for (double df : {1.0, 2.5, 7.0, 30.0, 400.0})
        for (double t : {0.0, 0.1, 1.0, 2.0, 5.0, 20.0, -3.0}) EXPECT_NEAR(stats::t_two_sided_p(t, df), oracle::two_sided(t, df), 1e-12);
}

TEST(Stats, WelchAndPooledMatchTextbook) {
    for (std::uint64_t c = 0; c < 50; ++c) {
        Rng rng(c);
        std::vector<double> a(3 + rng.below(20)), b(3 + rng.below(20));
        for (double& v : a) v = rng.normal() * 2 + 1;
        for (double& v : b) v = rng.normal();
        const auto w = stats::two_sample_ttest(a, b), p = stats::two_sample_ttest(a, b, true);
        const auto ow = oracle::welch(a, b), op = oracle::pooled(a, b);
        EXPECT_NEAR(w.t, ow.t, 1e-10);
        EXPECT_NEAR(w.df, ow.df, 1e-9);
        EXPECT_NEAR(w.p, ow.p, 1e-8);
        EXPECT_NEAR(p.p, op.p, 1e-8);
    }
}

TEST(Stats, DegenerateInputs) {
    const std::vector<double> same = {2, 2, 2};
    EXPECT_THROW(stats::one_sample_ttest(same), NumericError);
    EXPECT_THROW(stats::one_sample_ttest(std::vector<double>{1.0}), PreconditionError);
    EXPECT_THROW(stats::two_sample_ttest(same, same), NumericError);
}

TEST(Ols, MatchesDenseOracle) {
    for (std::uint64_t c = 0; c < 50; ++c) {
        Rng rng(c, 1);
        const std::size_t n = 10 + rng.below(50), p = 2 + rng.below(5);
        Matrix x(n, p);
        Eigen::MatrixXd ex(n, p);
        Eigen::VectorXd ey(n), ew(n);
        std::vector<double> y(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < p; ++j) x(i, j) = ex(i, j) = j == 0 ? 1.0 : rng.normal();
            y[i] = ey[i] = x(i, 1) * 0.7 + rng.normal();
            w[i] = ew[i] = 0.1 + 2 * rng.uniform();
        }
        std::vector<std::string> names(p, "");
        for (std::size_t j = 0; j < p; ++j) names[j] = "b" + std::to_string(j);
        for (bool weighted : {false, true}) {
            const auto r = weighted ? stats::ols(y, x, std::span<const double>(w), names)
                                    : stats::ols(y, x, std::nullopt, names);
            const auto o = oracle::wls(ey, ex, weighted ? ew : Eigen::VectorXd::Ones(n));
            for (std::size_t j = 0; j < p; ++j) {
                EXPECT_NEAR(r.coefficients[j], o.beta[j], 1e-10);
                EXPECT_NEAR(r.std_errors[j], o.se[j], 1e-10);
                EXPECT_NEAR(r.p_values[j], o.p[j], 1e-8);
            }
            EXPECT_NEAR(r.r_squared, o.r2, 1e-10);
            EXPECT_EQ(r.weights_used, weighted);
        }
    }
}

TEST(Ols, WeightScalingInvariance) {
    Rng rng(8);
    const std::size_t n = 40;
    Matrix x(n, 3);
    std::vector<double> y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1;
        x(i, 1) = rng.normal();
        x(i, 2) = rng.uniform();
        y[i] = rng.normal();
        w[i] = 0.5 + rng.uniform();
    }
    const auto a = stats::ols(y, x, std::span<const double>(w), {"c", "x1", "x2"});
    for (double s : {1e-3, 0.5, 7.0, 1e4}) {
        std::vector<double> ws(w);
        for (double& v : ws) v *= s;
        const auto b = stats::ols(y, x, std::span<const double>(ws), {"c", "x1", "x2"});
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_NEAR(a.coefficients[j], b.coefficients[j], 1e-10);
            EXPECT_NEAR(a.std_errors[j], b.std_errors[j], 1e-10);
            EXPECT_NEAR(a.p_values[j], b.p_values[j], 1e-10);
        }
        EXPECT_NEAR(a.r_squared, b.r_squared, 1e-12);
    }
}

TEST(Ols, RankDeficientNamesColumns) {
    Matrix x(6, 3);
    std::vector<double> y = {1, 2, 3, 4, 5, 7};
    for (std::size_t i = 0; i < 6; ++i) {
        x(i, 0) = 1;
        x(i, 1) = static_cast<double>(i);
        x(i, 2) = 2.0 * static_cast<double>(i) + 1.0;
    }
    try {
        stats::ols(y, x, std::nullopt, {"const", "t", "twice_t"});
        FAIL() << "expected NumericError";
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("twice_t"), std::string::npos);
    }
}

TEST(Ols, RSquaredConventions) {
    // exact fit with intercept
    Matrix x(5, 2);
    std::vector<double> y(5);
    for (std::size_t i = 0; i < 5; ++i) {
        x(i, 0) = 1;
        x(i, 1) = static_cast<double>(i);
        y[i] = 2 + 3 * static_cast<double>(i) + (i == 2 ? 0.1 : 0.0);
    }
    const auto r = stats::ols(y, x, std::nullopt, {"c", "t"});
    EXPECT_GT(r.r_squared, 0.99);
    EXPECT_NEAR(r.adj_r_squared, 1 - (1 - r.r_squared) * 4.0 / 3.0, 1e-12);
    // constant response: TSS = 0
    const std::vector<double> flat(5, 1.0);
    EXPECT_EQ(stats::ols(flat, x, std::nullopt, {"c", "t"}).r_squared, 0.0);
}
