#pragma once

// Samplers for the almost-sure limit of a self-affine chain.
//
// sample_limit accumulates the reversed-chain series
//   sum_{s>=1} a_{J_s} prod_{r<s} b_{J_r}
// up to the smallest depth t whose certified truncation bound
// rho^t (2-rho)/(1-rho) falls below the requested epsilon.
//
// sample_limit_geometric evaluates the same limit for two-map families with
// one zero-offset map through the geometric-clock series
//   (a_s / b_c) sum_{k>=0} b_c^{T_k} (b_s / b_c)^k,
// where T_k are partial sums of IID geometric waiting times for the shifting
// map. Its error_bound is the realized tail bound
//   a_s * b_c^{T_{kmax-1}-kmax} * b_s^{kmax} / (1-b_s),
// valid because T_k - 1 - k is nondecreasing in k.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fitness_ifs/affine.hpp"
#include "fitness_ifs/rng.hpp"

namespace fitness_ifs {

/// One draw of the limit value with a certified truncation error bound.
struct LimitSample {
    double value = 0.0;
    long truncation_depth = 0;
    double error_bound = 0.0;
};

/// Thrown when reaching the requested epsilon would exceed the step budget.
class BudgetExceededError : public std::runtime_error {
public:
    BudgetExceededError(long budget, double achieved)
        : std::runtime_error("sample_limit: truncation bound only reaches " +
                             std::to_string(achieved) + " within " + std::to_string(budget) +
                             " steps"),
          step_budget(budget),
          achieved_bound(achieved) {}

    long step_budget;
    double achieved_bound;
};

inline double truncation_bound(double rho, long depth) {
    return std::pow(rho, static_cast<double>(depth)) * (2.0 - rho) / (1.0 - rho);
}

/// Smallest depth t with rho^t (2-rho)/(1-rho) <= epsilon.
inline long truncation_depth_for(double rho, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("truncation depth: epsilon must be > 0");
    if (!(rho > 0.0) || !(rho < 1.0))
        throw std::invalid_argument("truncation depth: rho must lie in (0,1)");
    const double head = (2.0 - rho) / (1.0 - rho);
    if (head <= epsilon) return 0;
    long t = static_cast<long>(std::ceil(std::log(epsilon / head) / std::log(rho)));
    if (t < 0) t = 0;
    while (truncation_bound(rho, t) > epsilon) ++t;
    while (t > 0 && truncation_bound(rho, t - 1) <= epsilon) --t;
    return t;
}

/// Draw one limit sample to accuracy epsilon. If `word` is non-null the
/// drawn map indices are appended to it.
inline LimitSample sample_limit(const AffineFamily& family, double epsilon, Rng& rng,
                                long max_steps = 1000000,
                                std::vector<std::size_t>* word = nullptr) {
    const double rho = family.rho();
    const long depth = truncation_depth_for(rho, epsilon);
    if (depth > max_steps)
        throw BudgetExceededError(max_steps, truncation_bound(rho, max_steps));
    double sum = 0.0;
    double prod = 1.0;
    for (long s = 0; s < depth; ++s) {
        const std::size_t j = family.draw_index(rng);
        if (word) word->push_back(j);
        const AffineMap& m = family.map(j);
        sum += m.a * prod;
        prod *= m.b;
    }
    return LimitSample{sum, depth, truncation_bound(rho, depth)};
}

/// Consecutive hitting times T_0 < T_1 < ... of a rate-`success` Bernoulli
/// clock; increments are IID geometric on {1, 2, ...}.
class GeometricClock {
public:
    GeometricClock(Rng& rng, double success) : rng_(&rng), success_(success) {
        if (!(success > 0.0) || !(success <= 1.0))
            throw std::invalid_argument("GeometricClock: success probability must be in (0,1]");
    }

    std::uint64_t next() { return time_ += geometric1(*rng_, success_); }

private:
    Rng* rng_;
    double success_;
    std::uint64_t time_ = 0;
};

/// Limit sample via the geometric-clock series, truncated after kmax clock
/// terms. Requires a two-map family with exactly one zero-offset map.
inline LimitSample sample_limit_geometric(const AffineFamily& family, long kmax, Rng& rng) {
    if (family.map_count() != 2)
        throw std::invalid_argument("sample_limit_geometric: family must have exactly two maps");
    if (kmax < 1) throw std::invalid_argument("sample_limit_geometric: kmax must be >= 1");
    const bool zero0 = family.map(0).a == 0.0;
    const bool zero1 = family.map(1).a == 0.0;
    if (zero0 == zero1)
        throw std::invalid_argument(
            "sample_limit_geometric: family must have exactly one zero-offset map");
    const std::size_t scale = zero0 ? 0 : 1;
    const std::size_t shift = 1 - scale;
    const AffineMap& mc = family.map(scale);
    const AffineMap& ms = family.map(shift);
    if (!(mc.b > 0.0))
        throw std::invalid_argument("sample_limit_geometric: zero-offset map needs b > 0");
    // ms.a > 0 and ms.a + ms.b <= 1 imply ms.b < 1, so the tail series converges.
    const double shift_prob = family.prob(shift);

    GeometricClock clock(rng, shift_prob);
    double value = 0.0;
    double term = 0.0;
    std::uint64_t t_last = 0;
    for (long k = 0; k < kmax; ++k) {
        const std::uint64_t t_prev = t_last;
        t_last = clock.next();
        const double gap = static_cast<double>(t_last - t_prev);
        if (k == 0)
            term = ms.a * std::pow(mc.b, gap - 1.0);
        else
            term *= std::pow(mc.b, gap - 1.0) * ms.b;
        value += term;
    }
    const double tail = ms.a *
                        std::pow(mc.b, static_cast<double>(t_last) - static_cast<double>(kmax)) *
                        std::pow(ms.b, static_cast<double>(kmax)) / (1.0 - ms.b);
    return LimitSample{value, kmax, tail};
}

/// Batch of limit samples with one derived stream per sample id, so the
/// result is identical no matter how many worker threads are used.
inline std::vector<LimitSample> sample_limit_batch(const AffineFamily& family, double epsilon,
                                                   std::size_t count, std::uint64_t seed,
                                                   unsigned jobs = 1) {
    std::vector<LimitSample> out(count);
    auto run_block = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng = derive_stream(seed, kTagSample, i);
            out[i] = sample_limit(family, epsilon, rng);
        }
    };
    if (jobs <= 1 || count < 2 * jobs) {
        run_block(0, count);
        return out;
    }
    std::vector<std::thread> workers;
    const std::size_t chunk = (count + jobs - 1) / jobs;
    for (unsigned w = 0; w < jobs; ++w) {
        const std::size_t begin = std::min<std::size_t>(w * chunk, count);
        const std::size_t end = std::min<std::size_t>(begin + chunk, count);
        if (begin < end) workers.emplace_back(run_block, begin, end);
    }
    for (auto& t : workers) t.join();
    return out;
}

inline std::vector<LimitSample> sample_limit_geometric_batch(const AffineFamily& family,
                                                             long kmax, std::size_t count,
                                                             std::uint64_t seed,
                                                             unsigned jobs = 1) {
    std::vector<LimitSample> out(count);
    auto run_block = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng = derive_stream(seed, kTagSample, i);
            out[i] = sample_limit_geometric(family, kmax, rng);
        }
    };
    if (jobs <= 1 || count < 2 * jobs) {
        run_block(0, count);
        return out;
    }
    std::vector<std::thread> workers;
    const std::size_t chunk = (count + jobs - 1) / jobs;
    for (unsigned w = 0; w < jobs; ++w) {
        const std::size_t begin = std::min<std::size_t>(w * chunk, count);
        const std::size_t end = std::min<std::size_t>(begin + chunk, count);
        if (begin < end) workers.emplace_back(run_block, begin, end);
    }
    for (auto& t : workers) t.join();
    return out;
}

}  // namespace fitness_ifs
