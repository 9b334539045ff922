#pragma once

// t-tests and (weighted) least squares with t-distribution p-values.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "polar/error.hpp"
#include "polar/linalg.hpp"

namespace polar::stats {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw PreconditionError("mean of empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Unbiased sample variance (n - 1 denominator), two-pass.
inline double variance(std::span<const double> x) {
    if (x.size() < 2) throw PreconditionError("variance needs at least two values");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

inline double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

namespace detail {

// Continued fraction for the incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw NumericError("incomplete beta: continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw PreconditionError("incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(lbt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::beta_cf(a, b, x) / a;
    return 1.0 - bt * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// Two-sided p-value P(|T| >= |t|) for Student t with `df` degrees of freedom.
inline double t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw PreconditionError("t distribution needs df > 0");
    if (std::isnan(t)) return std::nan("");
    if (std::isinf(t)) return 0.0;
    const double p = incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
    return std::clamp(p, 0.0, 1.0);
}

struct TTest {
    double t = 0.0;
    double p = 1.0;
    double df = 0.0;
    double mean = 0.0;       // sample mean (one-sample) or mean of a (two-sample)
    double mean_b = 0.0;     // two-sample only
};

/// One-sample t-test of H0: mean == mu0, two-sided.
inline TTest one_sample_ttest(std::span<const double> values, double mu0 = 0.0) {
    if (values.size() < 2) throw PreconditionError("one_sample_ttest: need at least two values");
    const double m = mean(values);
    const double sd = stddev(values);
    if (!(sd > 0.0)) throw NumericError("one_sample_ttest: zero variance");
    TTest r;
    r.mean = m;
    r.df = static_cast<double>(values.size() - 1);
    r.t = (m - mu0) / (sd / std::sqrt(static_cast<double>(values.size())));
    r.p = t_two_sided_p(r.t, r.df);
    return r;
}

/// Two-sample t-test of equal means, two-sided. Welch's unequal-variance form
/// by default; the pooled form with `equal_var`.
inline TTest two_sample_ttest(std::span<const double> a, std::span<const double> b, bool equal_var = false) {
    if (a.size() < 2 || b.size() < 2) throw PreconditionError("two_sample_ttest: each group needs two values");
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double ma = mean(a), mb = mean(b);
    const double va = variance(a), vb = variance(b);
    if (!(va > 0.0) && !(vb > 0.0)) throw NumericError("two_sample_ttest: zero variance in both groups");
    TTest r;
    r.mean = ma;
    r.mean_b = mb;
    if (equal_var) {
        const double sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
        r.df = na + nb - 2.0;
        r.t = (ma - mb) / std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
    } else {
        const double sa = va / na, sb = vb / nb;
        r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
        r.t = (ma - mb) / std::sqrt(sa + sb);
    }
    r.p = t_two_sided_p(r.t, r.df);
    return r;
}

struct RegressionReport {
    std::vector<std::string> names;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_values;
    std::vector<double> p_values;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    std::size_t n = 0;
    double df_resid = 0.0;
    double sigma2 = 0.0;
    bool weights_used = false;
    bool qr_fallback = false;

    std::size_t index_of(std::string_view name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return i;
        throw PreconditionError("no coefficient named '" + std::string(name) + "'");
    }
    double coef(std::string_view name) const { return coefficients[index_of(name)]; }
    double se(std::string_view name) const { return std_errors[index_of(name)]; }
    double p(std::string_view name) const { return p_values[index_of(name)]; }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["n"] = n;
        j["weights_used"] = weights_used;
        j["r_squared"] = r_squared;
        j["adj_r_squared"] = adj_r_squared;
        j["df_resid"] = df_resid;
        auto& cs = j["coefficients"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < names.size(); ++i)
            cs.push_back({{"name", names[i]},
                          {"estimate", coefficients[i]},
                          {"std_error", std_errors[i]},
                          {"t", t_values[i]},
                          {"p", p_values[i]}});
        return j;
    }
};

/// (Weighted) least squares of y on the columns of X.
///
/// Solves the normal equations by Cholesky; if that factorization is not
/// safely positive definite, falls back to Householder QR of sqrt(W) X. A
/// numerically rank-deficient design raises NumericError naming the columns
/// that are combinations of earlier ones. R^2 is centered when X contains a
/// constant column and uncentered otherwise.
inline RegressionReport ols(std::span<const double> y, const Matrix& x,
                            std::optional<std::span<const double>> weights, std::vector<std::string> names) {
    const std::size_t n = x.rows(), p = x.cols();
    if (y.size() != n) throw PreconditionError("ols: y and X row counts differ");
    if (names.size() != p) throw PreconditionError("ols: one name per column required");
    if (n <= p) throw PreconditionError("ols: need more observations than coefficients");
    std::vector<double> w(n, 1.0);
    if (weights) {
        if (weights->size() != n) throw PreconditionError("ols: weight count differs from n");
        for (std::size_t i = 0; i < n; ++i) {
            if (!((*weights)[i] > 0.0) || !std::isfinite((*weights)[i]))
                throw PreconditionError("ols: weights must be positive and finite");
            w[i] = (*weights)[i];
        }
    }

    Matrix xtwx(p, p);
    std::vector<double> xtwy(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < p; ++a) {
            const double wa = w[i] * x(i, a);
            xtwy[a] += wa * y[i];
            for (std::size_t b = 0; b <= a; ++b) xtwx(a, b) += wa * x(i, b);
        }
    }
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < a; ++b) xtwx(b, a) = xtwx(a, b);

    RegressionReport r;
    r.names = std::move(names);
    r.n = n;
    r.weights_used = weights.has_value();
    Matrix inv;
    Matrix l = xtwx;
    if (cholesky(l)) {
        r.coefficients = cholesky_solve(l, xtwy);
        inv = cholesky_inverse(l);
    } else {
        Matrix xs(n, p);
        std::vector<double> ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double sw = std::sqrt(w[i]);
            for (std::size_t a = 0; a < p; ++a) xs(i, a) = sw * x(i, a);
            ys[i] = sw * y[i];
        }
        QR qr(xs);
        auto dep = qr.dependent_columns(xs);
        if (!dep.empty()) {
            std::string msg = "ols: rank-deficient design; collinear columns:";
            for (std::size_t k = 0; k < dep.size(); ++k) msg += (k ? ", " : " ") + r.names[dep[k]];
            throw NumericError(msg);
        }
        r.qr_fallback = true;
        r.coefficients = qr.solve(ys);
        inv = qr.normal_inverse();
    }

    // residuals and fit statistics
    double rss = 0.0, wsum = 0.0, wy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t a = 0; a < p; ++a) fit += x(i, a) * r.coefficients[a];
        const double e = y[i] - fit;
        rss += w[i] * e * e;
        wsum += w[i];
        wy += w[i] * y[i];
    }
    bool has_const = false;
    for (std::size_t a = 0; a < p && !has_const; ++a) {
        bool constant = x(0, a) != 0.0;
        for (std::size_t i = 1; i < n && constant; ++i) constant = x(i, a) == x(0, a);
        has_const = constant;
    }
    const double ybar = has_const ? wy / wsum : 0.0;
    double tss = 0.0;
    for (std::size_t i = 0; i < n; ++i) tss += w[i] * (y[i] - ybar) * (y[i] - ybar);

    r.df_resid = static_cast<double>(n - p);
    r.sigma2 = rss / r.df_resid;
    r.r_squared = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 0.0;
    const double n_eff = static_cast<double>(n) - (has_const ? 1.0 : 0.0);
    r.adj_r_squared = 1.0 - (1.0 - r.r_squared) * n_eff / r.df_resid;
    r.std_errors.resize(p);
    r.t_values.resize(p);
    r.p_values.resize(p);
    for (std::size_t a = 0; a < p; ++a) {
        r.std_errors[a] = std::sqrt(std::max(0.0, r.sigma2 * inv(a, a)));
        r.t_values[a] = r.std_errors[a] > 0.0 ? r.coefficients[a] / r.std_errors[a]
                                              : (r.coefficients[a] == 0.0 ? 0.0
                                                                          : std::copysign(INFINITY, r.coefficients[a]));
        r.p_values[a] = t_two_sided_p(r.t_values[a], r.df_resid);
    }
    return r;
}

}  // namespace polar::stats
