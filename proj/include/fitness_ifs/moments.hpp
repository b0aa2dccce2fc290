#pragma once

// Exact moments of the stationary value at level u, the single-site
// stationary law, and Monte Carlo joint moments across several levels.
//
// The moment recursion follows from the distributional fixed point: with
// probability p the value is scaled by u, otherwise mapped to u + (1-u)x,
// giving
//   m_k = (1-p) / (1 - p u^k - (1-p)(1-u)^k)
//         * sum_{j=0..k-1} C(k,j) u^{k-j} (1-u)^j m_j,   m_0 = 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fitness_ifs/affine.hpp"
#include "fitness_ifs/limit_sampler.hpp"
#include "fitness_ifs/rng.hpp"
#include "fitness_ifs/stats.hpp"

namespace fitness_ifs {

struct MomentTable {
    double u = 0.0;
    double p = 0.0;
    std::vector<double> values;  // values[k] = E[X^k], k = 0..kmax

    double moment(int k) const { return values.at(static_cast<std::size_t>(k)); }
};

/// First moment in closed form: (1-p)u / ((1-p)u + p(1-u)).
inline double stationary_mean(double u, double p) {
    return (1.0 - p) * u / ((1.0 - p) * u + p * (1.0 - u));
}

inline MomentTable moments(double u, double p, int kmax) {
    if (!(u > 0.0) || !(u < 1.0)) throw std::invalid_argument("moments: u must lie in (0,1)");
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("moments: p must lie in (0,1)");
    if (kmax < 1) throw std::invalid_argument("moments: kmax must be >= 1");

    MomentTable table;
    table.u = u;
    table.p = p;
    table.values.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
    table.values[0] = 1.0;

    std::vector<double> binom(static_cast<std::size_t>(kmax) + 1, 0.0);  // Pascal row
    binom[0] = 1.0;
    for (int k = 1; k <= kmax; ++k) {
        for (int j = k; j >= 1; --j) binom[static_cast<std::size_t>(j)] += binom[static_cast<std::size_t>(j - 1)];
        const double denom = 1.0 - p * std::pow(u, k) - (1.0 - p) * std::pow(1.0 - u, k);
        if (!(denom > 0.0)) throw std::logic_error("moments: nonpositive denominator");
        double sum = 0.0;
        for (int j = 0; j < k; ++j)
            sum += binom[static_cast<std::size_t>(j)] * std::pow(u, k - j) *
                   std::pow(1.0 - u, j) * table.values[static_cast<std::size_t>(j)];
        const double mk = (1.0 - p) / denom * sum;
        if (mk > table.values[static_cast<std::size_t>(k - 1)] + 1e-12)
            throw std::logic_error("moments: sequence not nonincreasing");
        table.values[static_cast<std::size_t>(k)] = mk;
    }
    return table;
}

/// Stationary CDF of a single site: F_p(u) = (1-p)u / ((1-p)u + p(1-u)).
inline double single_site_cdf(double p, double u) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("single_site_cdf: p in (0,1)");
    if (!(u >= 0.0) || !(u <= 1.0)) throw std::invalid_argument("single_site_cdf: u in [0,1]");
    const double num = (1.0 - p) * u;
    return num / (num + p * (1.0 - u));
}

/// Stationary density f_p = dF_p/du = p(1-p) / ((1-2p)u + p)^2.
inline double single_site_density(double p, double u) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("single_site_density: p in (0,1)");
    if (!(u >= 0.0) || !(u <= 1.0)) throw std::invalid_argument("single_site_density: u in [0,1]");
    const double denom = (1.0 - 2.0 * p) * u + p;
    return p * (1.0 - p) / (denom * denom);
}

/// Monte Carlo estimate of E[prod_n X(u_n)] where all coordinates of one
/// sample are driven by the same environment word (the values at different
/// levels are dependent, so the word must be shared).
inline ValueWithError joint_moment(double p, std::span<const double> u_list,
                                   std::size_t samples, double epsilon, std::uint64_t seed) {
    if (u_list.empty()) throw std::invalid_argument("joint_moment: u_list must be non-empty");
    if (samples == 0) throw std::invalid_argument("joint_moment: need samples >= 1");

    std::vector<AffineFamily> families;
    families.reserve(u_list.size());
    long depth = 0;
    for (double u : u_list) {
        families.push_back(AffineFamily::fitness(u, p));
        depth = std::max(depth, truncation_depth_for(families.back().rho(), epsilon));
    }

    RunningStats stats;
    std::vector<double> sums(u_list.size());
    std::vector<double> prods(u_list.size());
    for (std::size_t i = 0; i < samples; ++i) {
        Rng rng = derive_stream(seed, kTagSample, i);
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(prods.begin(), prods.end(), 1.0);
        for (long s = 0; s < depth; ++s) {
            // One shared index per step; the fitness presets at every u put
            // the scaling map first with the same probability p.
            const std::size_t j = families.front().draw_index(rng);
            for (std::size_t c = 0; c < families.size(); ++c) {
                const AffineMap& m = families[c].map(j);
                sums[c] += m.a * prods[c];
                prods[c] *= m.b;
            }
        }
        double product = 1.0;
        for (double v : sums) product *= v;
        stats.add(product);
    }
    return stats.estimate();
}

}  // namespace fitness_ifs
