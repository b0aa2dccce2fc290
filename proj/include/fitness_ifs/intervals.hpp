#pragma once

// Binary interval coding of [0,1] under the two-map system
//   S_0(x) = u + (1-u) x   (right piece, mass 1-p),
//   S_1(x) = u x           (left piece, mass p).
// A word e = (e_1, ..., e_t) codes I(e) = S_{e_1} o ... o S_{e_t}([0,1]) with
//   |I(e)| = (1-u)^(t-|e|) u^|e|,   mu(I(e)) = (1-p)^(t-|e|) p^|e|,
// where |e| counts ones. The 2^t intervals tile [0,1] and overlap only at
// endpoints, which are D-points.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fitness_ifs/affine.hpp"
#include "fitness_ifs/limit_sampler.hpp"
#include "fitness_ifs/rng.hpp"
#include "fitness_ifs/stats.hpp"

namespace fitness_ifs {

inline constexpr int kMaxIntervalDepth = 200;

struct IntervalCode {
    std::vector<std::uint8_t> word;  // e_1 ... e_t
    double lo = 0.0;
    double hi = 1.0;
    int ones = 0;

    int depth() const { return static_cast<int>(word.size()); }

    /// log |I| and log mu(I), exact in log space (never the underflowed product).
    double log_length(double u) const {
        return (depth() - ones) * std::log1p(-u) + ones * std::log(u);
    }

    double log_mass(double p) const {
        return (depth() - ones) * std::log1p(-p) + ones * std::log(p);
    }

    double length(double u) const { return std::exp(log_length(u)); }
    double mass(double p) const { return std::exp(log_mass(p)); }
};

/// Compute interval endpoints for a word by folding the affine maps from the
/// innermost one outward.
inline IntervalCode interval_from_word(std::vector<std::uint8_t> word, double u) {
    IntervalCode code;
    code.word = std::move(word);
    double scale = 1.0, offset = 0.0;
    for (auto it = code.word.rbegin(); it != code.word.rend(); ++it) {
        if (*it == 1) {
            scale *= u;
            offset *= u;
        } else {
            scale *= 1.0 - u;
            offset = u + (1.0 - u) * offset;
        }
        code.ones += (*it == 1) ? 1 : 0;
    }
    code.lo = offset;
    code.hi = offset + scale;
    return code;
}

/// Depth-t interval containing x. Boundary convention: x <= u takes the left
/// piece (digit 1); boundary points are D-points, a mu-null set.
inline IntervalCode locate(double x, double u, int depth) {
    if (!(x >= 0.0) || !(x <= 1.0)) throw std::invalid_argument("locate: x must lie in [0,1]");
    if (!(u > 0.0) || !(u < 1.0)) throw std::invalid_argument("locate: u must lie in (0,1)");
    if (depth < 1 || depth > kMaxIntervalDepth)
        throw std::invalid_argument("locate: depth must lie in [1," +
                                    std::to_string(kMaxIntervalDepth) + "]");
    std::vector<std::uint8_t> word(static_cast<std::size_t>(depth));
    double z = x;
    for (int i = 0; i < depth; ++i) {
        if (z <= u) {
            word[static_cast<std::size_t>(i)] = 1;
            z /= u;
        } else {
            word[static_cast<std::size_t>(i)] = 0;
            z = (z - u) / (1.0 - u);
        }
        z = std::min(1.0, std::max(0.0, z));
    }
    return interval_from_word(std::move(word), u);
}

/// All 2^t intervals of depth t, sorted by left endpoint.
inline std::vector<IntervalCode> interval_partition(double u, int depth) {
    if (depth < 1 || depth > 24) throw std::invalid_argument("interval_partition: depth in [1,24]");
    const std::size_t count = std::size_t{1} << depth;
    std::vector<IntervalCode> cells;
    cells.reserve(count);
    std::vector<std::uint8_t> word(static_cast<std::size_t>(depth));
    for (std::size_t bits = 0; bits < count; ++bits) {
        for (int i = 0; i < depth; ++i)
            word[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((bits >> i) & 1u);
        cells.push_back(interval_from_word(word, u));
    }
    std::sort(cells.begin(), cells.end(),
              [](const IntervalCode& a, const IntervalCode& b) { return a.lo < b.lo; });
    return cells;
}

/// Chi-square check that located digits of stationary samples are IID
/// Bernoulli(p): marginal frequency plus non-overlapping consecutive pairs
/// (overlapping pairs would not be chi-square distributed).
struct DigitLawReport {
    std::size_t samples = 0;
    int depth = 0;
    double ones_frequency = 0.0;
    double chi2_marginal = 0.0;
    double chi2_pairs = 0.0;
    bool marginal_ok = false;
    bool pairs_ok = false;
    bool mass_identity_ok = false;  // product of digit probs == closed form, per word
    double alpha = 0.0;
};

inline DigitLawReport digit_law_check(double u, double p, std::size_t samples, int depth,
                                      std::uint64_t seed, double alpha = 0.01) {
    if (depth < 2) throw std::invalid_argument("digit_law_check: depth must be >= 2");
    const AffineFamily family = AffineFamily::fitness(u, p);
    // Truncation well below the typical depth-t interval length, so the
    // located digits are those of the untruncated limit except on a
    // negligible boundary set.
    const double epsilon = 1e-12;

    DigitLawReport report;
    report.samples = samples;
    report.depth = depth;
    report.alpha = alpha;
    report.mass_identity_ok = true;

    std::size_t ones = 0;
    std::array<std::size_t, 4> pair_counts{};  // index 2*first + second
    for (std::size_t i = 0; i < samples; ++i) {
        Rng rng = derive_stream(seed, kTagSample, i);
        const LimitSample sample = sample_limit(family, epsilon, rng);
        const IntervalCode cell = locate(sample.value, u, depth);
        ones += static_cast<std::size_t>(cell.ones);
        for (int d = 0; d + 1 < depth; d += 2) {
            const std::size_t a = cell.word[static_cast<std::size_t>(d)];
            const std::size_t b = cell.word[static_cast<std::size_t>(d) + 1];
            ++pair_counts[2 * a + b];
        }
        // Product of per-digit probabilities vs the closed form, in log space.
        const double direct = cell.ones * std::log(p) + (depth - cell.ones) * std::log1p(-p);
        if (std::fabs(direct - cell.log_mass(p)) > 1e-9) report.mass_identity_ok = false;
    }

    const std::size_t digit_total = samples * static_cast<std::size_t>(depth);
    report.ones_frequency = static_cast<double>(ones) / static_cast<double>(digit_total);
    {
        const std::array<std::size_t, 2> observed{digit_total - ones, ones};
        const std::array<double, 2> expected{1.0 - p, p};
        report.chi2_marginal = chi_square_statistic(observed, expected, digit_total);
        report.marginal_ok = report.chi2_marginal <= chi_square_critical(1, alpha);
    }
    {
        std::size_t pair_total = 0;
        for (std::size_t c : pair_counts) pair_total += c;
        const std::array<double, 4> expected{(1.0 - p) * (1.0 - p), (1.0 - p) * p,
                                             p * (1.0 - p), p * p};
        report.chi2_pairs = chi_square_statistic(pair_counts, expected, pair_total);
        report.pairs_ok = report.chi2_pairs <= chi_square_critical(3, alpha);
    }
    return report;
}

}  // namespace fitness_ifs
