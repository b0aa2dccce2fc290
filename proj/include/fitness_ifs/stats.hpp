#pragma once

// Small statistics toolbox used by the verification suite: running moments,
// Kolmogorov-Smirnov tests, chi-square goodness of fit, least squares.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fitness_ifs {

/// Point estimate with a standard error.
struct ValueWithError {
    double value = 0.0;
    double stderror = 0.0;
};

/// Welford accumulator for mean and variance.
class RunningStats {
public:
    void add(double x) {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }

    std::size_t count() const { return count_; }
    double mean() const { return mean_; }

    double variance() const {
        return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
    }

    double stddev() const { return std::sqrt(variance()); }

    double stderror() const {
        return count_ > 0 ? stddev() / std::sqrt(static_cast<double>(count_)) : 0.0;
    }

    ValueWithError estimate() const { return {mean(), stderror()}; }

private:
    std::size_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// One-sample KS statistic of `values` against the CDF callable `cdf`.
template <typename Cdf>
double ks_statistic(std::vector<double> values, Cdf&& cdf) {
    if (values.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(f - lo, hi - f));
    }
    return d;
}

/// Two-sample KS statistic.
inline double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// Kolmogorov tail function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Critical lambda with Q(lambda) = alpha (asymptotic KS critical value).
inline double kolmogorov_critical(double alpha) {
    double lo = 0.2, hi = 4.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (kolmogorov_q(mid) > alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Asymptotic one-sample KS test at level alpha; true = consistent with cdf.
inline bool ks_test_passes(double d_statistic, std::size_t n, double alpha) {
    return std::sqrt(static_cast<double>(n)) * d_statistic <= kolmogorov_critical(alpha);
}

inline bool ks_two_sample_passes(double d_statistic, std::size_t na, std::size_t nb, double alpha) {
    const double n_eff = static_cast<double>(na) * static_cast<double>(nb) /
                         static_cast<double>(na + nb);
    return std::sqrt(n_eff) * d_statistic <= kolmogorov_critical(alpha);
}

/// Upper-alpha chi-square quantile. Exact constants for the levels the suite
/// uses, Wilson-Hilferty for anything else.
inline double chi_square_critical(int dof, double alpha) {
    if (dof < 1) throw std::invalid_argument("chi_square_critical: dof must be >= 1");
    if (alpha == 0.01) {
        static constexpr double q01[] = {6.634896601, 9.210340372, 11.34486673,
                                         13.27670414, 15.08627247};
        if (dof <= 5) return q01[dof - 1];
    }
    if (alpha == 0.05) {
        static constexpr double q05[] = {3.841458821, 5.991464547, 7.814727903,
                                         9.487729037, 11.07049769};
        if (dof <= 5) return q05[dof - 1];
    }
    // Wilson-Hilferty approximation with a normal quantile via
    // Acklam-style rational fit is overkill here; the suite only ever asks
    // for the tabulated levels. Guard against silent misuse.
    throw std::invalid_argument("chi_square_critical: untabulated (dof, alpha)");
}

/// Pearson chi-square for observed counts vs expected probabilities.
inline double chi_square_statistic(std::span<const std::size_t> observed,
                                   std::span<const double> expected_prob,
                                   std::size_t total) {
    if (observed.size() != expected_prob.size())
        throw std::invalid_argument("chi_square_statistic: size mismatch");
    double stat = 0.0;
    for (std::size_t c = 0; c < observed.size(); ++c) {
        const double expect = expected_prob[c] * static_cast<double>(total);
        if (expect <= 0.0) throw std::invalid_argument("chi_square_statistic: zero expected cell");
        const double diff = static_cast<double>(observed[c]) - expect;
        stat += diff * diff / expect;
    }
    return stat;
}

/// Ordinary least squares fit y = slope * x + intercept.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderror = 0.0;
};

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (fit.slope * x[i] + fit.intercept);
            rss += r * r;
        }
        fit.slope_stderror = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return fit;
}

/// Composite Simpson rule on [a, b] with n (even) subintervals.
template <typename F>
double simpson(F&& f, double a, double b, int n = 100000) {
    if (n < 2) throw std::invalid_argument("simpson: need n >= 2");
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

}  // namespace fitness_ifs
