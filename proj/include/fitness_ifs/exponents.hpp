#pragma once

// Local exponents of the stationary measure mu_u.
//
// At a D-point with code (n_1,...,n_m), approaching from the right along
// delta_k = u^(n_m+k) (1-u)^m gives increments p^(n_m+k) (1-p)^m, and from
// the left along delta_k = u^(n_m) (1-u)^(m+k-1) gives p^(n_m) (1-p)^(m+k-1);
// the log-log slopes are ln p / ln u and ln(1-p) / ln(1-u). Off D, the
// digit law makes the exponent converge mu-a.s. to
//   (p ln p + (1-p) ln(1-p)) / (p ln u + (1-p) ln(1-u)),
// which equals 1 exactly when u = p (uniform case) and is < 1 otherwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fitness_ifs/affine.hpp"
#include "fitness_ifs/dense_set.hpp"
#include "fitness_ifs/rng.hpp"
#include "fitness_ifs/stats.hpp"

namespace fitness_ifs {

/// mu-a.s. local exponent; exactly 1 iff u = p.
inline double ae_exponent(double u, double p) {
    if (!(u > 0.0) || !(u < 1.0)) throw std::invalid_argument("ae_exponent: u must lie in (0,1)");
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("ae_exponent: p must lie in (0,1)");
    const double num = p * std::log(p) + (1.0 - p) * std::log1p(-p);
    const double den = p * std::log(u) + (1.0 - p) * std::log1p(-u);
    return num / den;
}

inline double right_exponent_on_d(double u, double p) { return std::log(p) / std::log(u); }

inline double left_exponent_on_d(double u, double p) { return std::log1p(-p) / std::log1p(-u); }

struct DPointExponents {
    double right_slope = 0.0;
    double left_slope = 0.0;
    double right_theory = 0.0;
    double left_theory = 0.0;
};

/// Strip trailing telescoped exponents: (..., a, a-1) codes the same point
/// as (..., a-1).
inline DCode canonical_code(DCode code) {
    while (code.size() >= 2 && code[code.size() - 2] == code[code.size() - 1] + 1) {
        const std::uint16_t folded = code[code.size() - 1];
        code.pop_back();
        code.pop_back();
        code.push_back(folded);
    }
    return code;
}

/// One-sided exponents at a D-point from exact code increments, via log-log
/// regression over k in [k_min, k_max]. Requires a canonical code with
/// m >= 2 (single-term codes sit at y = u^n where the left construction
/// degenerates).
inline DPointExponents d_point_exponents(const DCode& raw_code, double u, double p, int k_min = 1,
                                         int k_max = 20) {
    if (!is_valid_code(raw_code)) throw std::invalid_argument("d_point_exponents: invalid code");
    if (k_min < 1 || k_max <= k_min) throw std::invalid_argument("d_point_exponents: bad k range");
    const DCode code = canonical_code(raw_code);
    const std::size_t m = code.size();
    if (m < 2)
        throw std::invalid_argument("d_point_exponents: code must have m >= 2 terms (got a power of u)");
    if (m + static_cast<std::size_t>(k_max) + 1 > DCode::kMaxLen)
        throw std::invalid_argument("d_point_exponents: k_max exceeds code capacity");

    const double g0 = code_g(code, p);
    const std::uint16_t n_m = code[m - 1];

    std::vector<double> log_delta_r, log_inc_r, log_delta_l, log_inc_l;
    for (int k = k_min; k <= k_max; ++k) {
        // Right: y + delta has code (n_1, ..., n_m, n_m + k).
        DCode right = code;
        right.push_back(static_cast<std::uint16_t>(n_m + k));
        const double inc_r = code_g(right, p) - g0;
        log_delta_r.push_back((n_m + k) * std::log(u) + static_cast<double>(m) * std::log1p(-u));
        log_inc_r.push_back(std::log(inc_r));

        // Left: y - delta has code (n_1, ..., n_{m-1}, n_m+1 repeated k times).
        DCode left;
        for (std::size_t l = 0; l + 1 < m; ++l) left.push_back(code[l]);
        for (int r = 0; r < k; ++r) left.push_back(static_cast<std::uint16_t>(n_m + 1));
        const double inc_l = g0 - code_g(left, p);
        log_delta_l.push_back(n_m * std::log(u) +
                              static_cast<double>(m + static_cast<std::size_t>(k) - 1) * std::log1p(-u));
        log_inc_l.push_back(std::log(inc_l));
    }

    DPointExponents out;
    out.right_slope = linear_fit(log_delta_r, log_inc_r).slope;
    out.left_slope = linear_fit(log_delta_l, log_inc_l).slope;
    out.right_theory = right_exponent_on_d(u, p);
    out.left_theory = left_exponent_on_d(u, p);
    return out;
}

/// Monte Carlo estimate of the a.s. exponent: sample stationary values,
/// read off their depth-t interval digit counts, average the log-mass /
/// log-length ratio.
///
/// Digits are taken from the driving map word: a limit-series sample with
/// word (J_1, J_2, ...) satisfies X = S_{J_1}(X') with X' distributed as X,
/// so the depth-t interval digits of X are exactly the first t indices
/// (scaling map -> digit 1). This is exact at any depth, whereas re-deriving
/// digits from the double value breaks down once the interval length falls
/// under one ulp (depth ~52).
inline ValueWithError empirical_exponent(double u, double p, std::size_t samples, int depth,
                                         std::uint64_t seed) {
    if (depth < 1 || depth > 200)
        throw std::invalid_argument("empirical_exponent: depth out of range [1,200]");
    if (samples == 0) throw std::invalid_argument("empirical_exponent: need samples >= 1");
    const AffineFamily family = AffineFamily::fitness(u, p);
    const double log_p1 = std::log(p), log_p0 = std::log1p(-p);
    const double log_u1 = std::log(u), log_u0 = std::log1p(-u);

    RunningStats stats;
    for (std::size_t i = 0; i < samples; ++i) {
        Rng rng = derive_stream(seed, kTagSample, i);
        int ones = 0;
        for (int s = 0; s < depth; ++s)
            ones += family.draw_index(rng) == 0 ? 1 : 0;  // scaling map -> digit 1
        const int zeros = depth - ones;
        const double log_mass = ones * log_p1 + zeros * log_p0;
        const double log_len = ones * log_u1 + zeros * log_u0;
        stats.add(log_mass / log_len);
    }
    return stats.estimate();
}

struct Fig2Row {
    double u = 0.0;
    double d_exponent_min = 0.0;
    double ae = 0.0;
};

/// Data behind the two local-exponent curves over a u-grid at fixed p: the
/// smaller one-sided D-exponent capped at 1, and the a.s. exponent.
inline std::vector<Fig2Row> figure2_data(double p, std::span<const double> u_grid) {
    std::vector<Fig2Row> rows;
    rows.reserve(u_grid.size());
    for (double u : u_grid) {
        Fig2Row row;
        row.u = u;
        row.d_exponent_min = (u <= p) ? std::min(right_exponent_on_d(u, p), 1.0)
                                      : std::min(left_exponent_on_d(u, p), 1.0);
        row.ae = ae_exponent(u, p);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fitness_ifs
