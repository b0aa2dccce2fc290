#pragma once

// Self-affine Markov chains on [0,1]: a family of K+1 affine maps
// S_j(x) = a_j + b_j x chosen IID from a probability vector. The chain
// value(t) = S_{J_t}(value(t-1)) stays in [0,1] because every map sends
// [0,1] into itself (0 <= a_j <= a_j + b_j <= 1).

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fitness_ifs/rng.hpp"

namespace fitness_ifs {

struct AffineMap {
    double a = 0.0;
    double b = 0.0;
    double operator()(double x) const { return a + b * x; }
};

enum class FamilyKind { fitness, erdos, custom };

inline const char* to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::fitness: return "fitness";
        case FamilyKind::erdos: return "erdos";
        default: return "custom";
    }
}

/// Validated family of affine maps with selection probabilities.
class AffineFamily {
public:
    /// Empirical-CDF chain of the fitness model at level u:
    /// map 0 = (0, u) with probability p (good environment),
    /// map 1 = (u, 1-u) with probability 1-p.
    static AffineFamily fitness(double u, double p) {
        require_open_unit(u, "fitness family u");
        require_open_unit(p, "fitness family p");
        return AffineFamily(FamilyKind::fitness, u,
                            {AffineMap{0.0, u}, AffineMap{u, 1.0 - u}}, {p, 1.0 - p});
    }

    /// Classical two-map system {x -> 1-u+ux, x -> ux}:
    /// map 0 = (1-u, u) with probability 1-p, map 1 = (0, u) with probability p.
    static AffineFamily erdos(double u, double p) {
        require_open_unit(u, "erdos family u");
        require_open_unit(p, "erdos family p");
        return AffineFamily(FamilyKind::erdos, u,
                            {AffineMap{1.0 - u, u}, AffineMap{0.0, u}}, {1.0 - p, p});
    }

    /// Arbitrary coefficient family at a fixed u (the value of u is not
    /// retained; only the numeric coefficients matter).
    static AffineFamily custom(std::vector<AffineMap> maps, std::vector<double> probs) {
        return AffineFamily(FamilyKind::custom, std::numeric_limits<double>::quiet_NaN(),
                            std::move(maps), std::move(probs));
    }

    FamilyKind kind() const { return kind_; }
    double u() const { return u_; }
    std::size_t map_count() const { return maps_.size(); }

    const AffineMap& map(std::size_t j) const {
        if (j >= maps_.size())
            throw std::out_of_range("AffineFamily: map index " + std::to_string(j) +
                                    " out of range (K=" + std::to_string(maps_.size() - 1) + ")");
        return maps_[j];
    }

    double prob(std::size_t j) const {
        if (j >= probs_.size()) throw std::out_of_range("AffineFamily: probability index");
        return probs_[j];
    }

    /// Mean contraction factor sum_j p_j b_j, strictly below 1 by construction.
    double rho() const {
        double r = 0.0;
        for (std::size_t j = 0; j < maps_.size(); ++j) r += probs_[j] * maps_[j].b;
        return r;
    }

    /// Draw a map index from the probability vector (inversion on cumsum).
    std::size_t draw_index(Rng& rng) const {
        const double x = uniform01(rng);
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < probs_.size(); ++j) {
            acc += probs_[j];
            if (x < acc) return j;
        }
        return probs_.size() - 1;
    }

private:
    AffineFamily(FamilyKind kind, double u, std::vector<AffineMap> maps, std::vector<double> probs)
        : kind_(kind), u_(u), maps_(std::move(maps)), probs_(std::move(probs)) {
        if (maps_.empty() || maps_.size() != probs_.size())
            throw std::invalid_argument("AffineFamily: need one probability per map");
        double sum = 0.0;
        for (double q : probs_) {
            if (!(q > 0.0)) throw std::invalid_argument("AffineFamily: probabilities must be > 0");
            sum += q;
        }
        if (std::fabs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("AffineFamily: probabilities must sum to 1");
        bool all_b_one = true;
        for (const auto& m : maps_) {
            if (!(m.a >= 0.0) || !(m.a + m.b <= 1.0) || !(m.b >= 0.0))
                throw std::invalid_argument(
                    "AffineFamily: coefficients must satisfy 0 <= a <= a+b <= 1");
            all_b_one = all_b_one && m.b == 1.0;
        }
        if (all_b_one)
            throw std::invalid_argument("AffineFamily: all slopes equal 1 (no contraction)");
        for (std::size_t i = 0; i < maps_.size(); ++i)
            for (std::size_t j = i + 1; j < maps_.size(); ++j)
                if (maps_[i].a == maps_[j].a && maps_[i].b == maps_[j].b)
                    throw std::invalid_argument("AffineFamily: duplicate map coefficients");
    }

    static void require_open_unit(double x, const char* what) {
        if (!(x > 0.0) || !(x < 1.0))
            throw std::invalid_argument(std::string(what) + " must lie in (0,1)");
    }

    FamilyKind kind_;
    double u_;
    std::vector<AffineMap> maps_;
    std::vector<double> probs_;
};

struct ChainState {
    double value = 0.0;
    long time = 0;
};

/// One forward transition value' = a_j + b_j * value.
inline ChainState forward_step(const ChainState& state, const AffineFamily& family,
                               std::size_t j) {
    const AffineMap& m = family.map(j);
    return ChainState{m(state.value), state.time + 1};
}

/// Forward orbit along a whole word of map indices.
inline ChainState forward_orbit(ChainState state, const AffineFamily& family,
                                std::span<const std::size_t> word) {
    for (std::size_t j : word) state = forward_step(state, family, j);
    return state;
}

/// Reversed-chain partial sum
///   sum_{s=1..t} a_{w_s} * prod_{r<s} b_{w_r}  +  theta0 * prod_{r<=t} b_{w_r}.
/// For any word w, forward iteration along w from theta0 equals this value
/// evaluated on the reversed word (pathwise, not just in distribution).
inline double reversed_partial_sum(const AffineFamily& family,
                                   std::span<const std::size_t> word, double theta0) {
    if (!(theta0 >= 0.0) || !(theta0 <= 1.0))
        throw std::invalid_argument("reversed_partial_sum: theta0 must lie in [0,1]");
    double sum = 0.0;
    double prod = 1.0;
    for (std::size_t j : word) {
        const AffineMap& m = family.map(j);
        sum += m.a * prod;
        prod *= m.b;
    }
    return sum + theta0 * prod;
}

}  // namespace fitness_ifs
