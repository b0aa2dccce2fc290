#pragma once

// Finite-site simulation of the environment-driven fitness process.
//
// N sites carry values in [0,1]. Each step draws one shared environment bit
// B (1 with probability p) and one independent uniform per site; a site is
// max-updated under a good environment (B=1) and min-updated under a bad one.
//
// Stream discipline: one master seed derives the environment stream and one
// stream per site, so coupled_run and simulate consume the identical
// environment word and per-site uniforms for a given seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fitness_ifs/rng.hpp"

namespace fitness_ifs {

struct ModelParams {
    double p = 0.5;        // probability the environment is good (B = 1)
    int num_sites = 1;     // N
    std::uint64_t seed = 0;
    int horizon = 0;       // number of steps T

    void validate() const {
        if (!(p > 0.0) || !(p < 1.0))
            throw std::invalid_argument("ModelParams: p must lie in (0,1)");
        if (num_sites < 1) throw std::invalid_argument("ModelParams: num_sites must be >= 1");
        if (horizon < 0) throw std::invalid_argument("ModelParams: horizon must be >= 0");
    }
};

struct FitnessState {
    std::vector<double> fitness;
    long time = 0;
};

/// Initial condition: IID uniform, a constant value, or an explicit vector.
class InitSpec {
public:
    static InitSpec iid_uniform() { return InitSpec(Uniform{}); }

    static InitSpec constant(double value) {
        if (!(value >= 0.0) || !(value <= 1.0))
            throw std::invalid_argument("InitSpec: constant value must lie in [0,1]");
        return InitSpec(Constant{value});
    }

    static InitSpec explicit_vector(std::vector<double> values) {
        for (double v : values)
            if (!(v >= 0.0) || !(v <= 1.0))
                throw std::invalid_argument("InitSpec: explicit values must lie in [0,1]");
        return InitSpec(Explicit{std::move(values)});
    }

    /// Materialize the initial vector; site_rngs supplies one stream per site.
    std::vector<double> materialize(int num_sites, std::span<Rng> site_rngs) const {
        if (const auto* e = std::get_if<Explicit>(&spec_)) {
            if (static_cast<int>(e->values.size()) != num_sites)
                throw std::invalid_argument("InitSpec: explicit vector length != num_sites");
            return e->values;
        }
        std::vector<double> out(static_cast<std::size_t>(num_sites));
        if (const auto* c = std::get_if<Constant>(&spec_)) {
            std::fill(out.begin(), out.end(), c->value);
            return out;
        }
        for (int n = 0; n < num_sites; ++n) out[static_cast<std::size_t>(n)] = uniform01(site_rngs[static_cast<std::size_t>(n)]);
        return out;
    }

private:
    struct Uniform {};
    struct Constant { double value; };
    struct Explicit { std::vector<double> values; };

    template <typename T>
    explicit InitSpec(T spec) : spec_(std::move(spec)) {}

    std::variant<Uniform, Constant, Explicit> spec_;
};

/// One synchronous update of every site.
inline FitnessState step(const FitnessState& state, int b, std::span<const double> uniforms) {
    if (b != 0 && b != 1) throw std::invalid_argument("step: environment bit must be 0 or 1");
    if (uniforms.size() != state.fitness.size())
        throw std::invalid_argument("step: got " + std::to_string(uniforms.size()) +
                                    " uniforms for " + std::to_string(state.fitness.size()) +
                                    " sites");
    FitnessState next;
    next.time = state.time + 1;
    next.fitness.resize(state.fitness.size());
    if (b == 1) {
        for (std::size_t n = 0; n < uniforms.size(); ++n)
            next.fitness[n] = std::max(state.fitness[n], uniforms[n]);
    } else {
        for (std::size_t n = 0; n < uniforms.size(); ++n)
            next.fitness[n] = std::min(state.fitness[n], uniforms[n]);
    }
    return next;
}

namespace detail {

inline std::vector<Rng> make_site_streams(const ModelParams& params) {
    std::vector<Rng> streams;
    streams.reserve(static_cast<std::size_t>(params.num_sites));
    for (int n = 0; n < params.num_sites; ++n)
        streams.push_back(derive_stream(params.seed, kTagSite, static_cast<std::uint64_t>(n)));
    return streams;
}

}  // namespace detail

/// Full trajectory (horizon+1 states), deterministic given params.seed.
inline std::vector<FitnessState> simulate(const ModelParams& params, const InitSpec& init) {
    params.validate();
    Rng env = derive_stream(params.seed, kTagEnvironment);
    std::vector<Rng> sites = detail::make_site_streams(params);

    std::vector<FitnessState> trajectory;
    trajectory.reserve(static_cast<std::size_t>(params.horizon) + 1);
    trajectory.push_back(FitnessState{init.materialize(params.num_sites, sites), 0});

    std::vector<double> uniforms(static_cast<std::size_t>(params.num_sites));
    for (int t = 0; t < params.horizon; ++t) {
        const int b = bernoulli(env, params.p) ? 1 : 0;
        for (std::size_t n = 0; n < uniforms.size(); ++n) uniforms[n] = uniform01(sites[n]);
        trajectory.push_back(step(trajectory.back(), b, uniforms));
    }
    return trajectory;
}

/// Per-step record of the empirical fractions next to the two-map recursion
/// driven by the same environment word.
struct CouplingTrace {
    std::vector<double> u_grid;

    struct Row {
        long t = 0;
        int b = -1;  // -1 on the initial row (no environment bit consumed yet)
        std::vector<double> empirical;
        std::vector<double> theta;
    };

    std::vector<Row> rows;
    double max_deviation = 0.0;
};

/// Run the particle system and the Theta recursion side by side. The
/// recursion starts from the empirical fraction at t=0, so any deviation is
/// dynamical, not an initialization artifact.
inline CouplingTrace coupled_run(const ModelParams& params, std::vector<double> u_grid,
                                 const InitSpec& init = InitSpec::iid_uniform()) {
    params.validate();
    if (u_grid.empty()) throw std::invalid_argument("coupled_run: u_grid must be non-empty");
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        if (!(u_grid[i] > 0.0) || !(u_grid[i] < 1.0))
            throw std::invalid_argument("coupled_run: u_grid values must lie in (0,1)");
        if (i > 0 && !(u_grid[i] > u_grid[i - 1]))
            throw std::invalid_argument("coupled_run: u_grid must be strictly increasing");
    }

    Rng env = derive_stream(params.seed, kTagEnvironment);
    std::vector<Rng> sites = detail::make_site_streams(params);
    std::vector<double> fitness = init.materialize(params.num_sites, sites);
    const double inv_n = 1.0 / static_cast<double>(params.num_sites);

    auto empirical_at = [&](double u) {
        std::size_t count = 0;
        for (double f : fitness) count += (f <= u) ? 1 : 0;
        return static_cast<double>(count) * inv_n;
    };

    CouplingTrace trace;
    trace.u_grid = u_grid;
    std::vector<double> theta(u_grid.size());
    CouplingTrace::Row first;
    first.t = 0;
    first.empirical.resize(u_grid.size());
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        first.empirical[i] = empirical_at(u_grid[i]);
        theta[i] = first.empirical[i];
    }
    first.theta = theta;
    trace.rows.push_back(std::move(first));

    for (int t = 1; t <= params.horizon; ++t) {
        const int b = bernoulli(env, params.p) ? 1 : 0;
        if (b == 1) {
            for (std::size_t n = 0; n < fitness.size(); ++n)
                fitness[n] = std::max(fitness[n], uniform01(sites[n]));
        } else {
            for (std::size_t n = 0; n < fitness.size(); ++n)
                fitness[n] = std::min(fitness[n], uniform01(sites[n]));
        }
        CouplingTrace::Row row;
        row.t = t;
        row.b = b;
        row.empirical.resize(u_grid.size());
        for (std::size_t i = 0; i < u_grid.size(); ++i) {
            const double u = u_grid[i];
            theta[i] = (b == 1) ? theta[i] * u : theta[i] + (1.0 - theta[i]) * u;
            row.empirical[i] = empirical_at(u_grid[i]);
            trace.max_deviation = std::max(trace.max_deviation,
                                           std::fabs(row.empirical[i] - theta[i]));
        }
        row.theta = theta;
        trace.rows.push_back(std::move(row));
    }
    return trace;
}

}  // namespace fitness_ifs
