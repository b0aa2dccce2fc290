// Command-line front end: reproducible simulations, exact CDF grids, and
// the invariant verification battery, emitted as CSV or JSON.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fitness_ifs/fitness_ifs.hpp"

namespace fifs = fitness_ifs;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20250401;
constexpr const char* kSeedEnvVar = "FITNESS_IFS_SEED";

struct CommonOpts {
    std::uint64_t seed = kDefaultSeed;
    bool seed_given = false;
    std::string format = "csv";
    unsigned jobs = 1;

    std::uint64_t resolve_seed() const {
        if (seed_given) return seed;
        if (const char* env = std::getenv(kSeedEnvVar)) {
            try {
                return std::stoull(env);
            } catch (const std::exception&) {
                throw std::invalid_argument(std::string(kSeedEnvVar) +
                                            " must be an unsigned integer, got '" + env + "'");
            }
        }
        return seed;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed,
                    "RNG master seed (default " + std::to_string(kDefaultSeed) +
                        "; env " + kSeedEnvVar + " overrides the default)")
        ->each([&opts](const std::string&) { opts.seed_given = true; });
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--jobs", opts.jobs, "Worker threads for sampling")
        ->check(CLI::Range(1u, 64u))
        ->capture_default_str();
}

/// Buffers records and writes them as CSV or a JSON array of objects.
class OutputFile {
public:
    OutputFile(std::string path, std::string format)
        : path_(std::move(path)), format_(std::move(format)) {}

    void add(const fifs::Record& record) { records_.push_back(record); }

    void write() const {
        if (format_ == "json") {
            json rows = json::array();
            for (const auto& record : records_) {
                json obj = json::object();
                for (std::size_t i = 0; i < record.columns().size(); ++i) {
                    if (record.is_numeric(i))
                        obj[record.columns()[i]] = json::parse(record.values()[i]);
                    else
                        obj[record.columns()[i]] = record.values()[i];
                }
                rows.push_back(std::move(obj));
            }
            std::ofstream out(path_, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open " + path_);
            out << rows.dump(2) << '\n';
            return;
        }
        fifs::CsvWriter writer(path_);
        for (const auto& record : records_) writer.write(record);
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::string format_;
    std::vector<fifs::Record> records_;
};

fifs::InitSpec parse_init(const std::string& text) {
    if (text == "uniform") return fifs::InitSpec::iid_uniform();
    if (text.rfind("const:", 0) == 0) return fifs::InitSpec::constant(std::stod(text.substr(6)));
    if (text.rfind("explicit:", 0) == 0) {
        std::vector<double> values;
        std::string item;
        std::stringstream ss(text.substr(9));
        while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
        return fifs::InitSpec::explicit_vector(std::move(values));
    }
    throw std::invalid_argument("init must be 'uniform', 'const:<x>' or 'explicit:<x,y,...>'");
}

fifs::AffineFamily make_family(const std::string& kind, double u, double p) {
    if (kind == "fitness") return fifs::AffineFamily::fitness(u, p);
    if (kind == "erdos") return fifs::AffineFamily::erdos(u, p);
    throw std::invalid_argument("family must be 'fitness' or 'erdos'");
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

int run_simulate(double p, int sites, int horizon, const std::string& init_text,
                 const std::string& out, const CommonOpts& common) {
    fifs::ModelParams params{p, sites, common.resolve_seed(), horizon};
    const auto trajectory = fifs::simulate(params, parse_init(init_text));
    OutputFile file(out, common.format);
    for (const auto& state : trajectory)
        for (std::size_t n = 0; n < state.fitness.size(); ++n) {
            fifs::Record record;
            record.add("t", static_cast<long long>(state.time));
            record.add("site", static_cast<long long>(n));
            record.add("fitness", state.fitness[n]);
            file.add(record);
        }
    file.write();
    std::cout << "simulate: N=" << sites << " T=" << horizon << " p=" << p << " -> "
              << file.path() << "\n";
    return 0;
}

int run_couple(double p, int sites, int horizon, std::vector<double> u_grid,
               const std::string& out, const CommonOpts& common) {
    fifs::ModelParams params{p, sites, common.resolve_seed(), horizon};
    const fifs::CouplingTrace trace = fifs::coupled_run(params, std::move(u_grid));
    OutputFile file(out, common.format);
    for (const auto& row : trace.rows)
        for (std::size_t i = 0; i < trace.u_grid.size(); ++i) {
            fifs::Record record;
            record.add("t", static_cast<long long>(row.t));
            record.add("u", trace.u_grid[i]);
            record.add("empirical", row.empirical[i]);
            record.add("theta", row.theta[i]);
            record.add("deviation", std::fabs(row.empirical[i] - row.theta[i]));
            file.add(record);
        }
    file.write();
    std::cout << "couple: max deviation " << fifs::format_double(trace.max_deviation) << " -> "
              << file.path() << "\n";
    return 0;
}

int run_sample(double p, double u, const std::string& family_kind, const std::string& method,
               double epsilon, long kmax, std::size_t samples, const std::string& out,
               const CommonOpts& common) {
    const fifs::AffineFamily family = make_family(family_kind, u, p);
    std::vector<fifs::LimitSample> draws;
    if (method == "series")
        draws = fifs::sample_limit_batch(family, epsilon, samples, common.resolve_seed(),
                                         common.jobs);
    else if (method == "geometric")
        draws = fifs::sample_limit_geometric_batch(family, kmax, samples, common.resolve_seed(),
                                                   common.jobs);
    else
        throw std::invalid_argument("method must be 'series' or 'geometric'");

    OutputFile file(out, common.format);
    fifs::RunningStats stats;
    double worst_bound = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        fifs::Record record;
        record.add("sample_id", static_cast<long long>(i));
        record.add("value", draws[i].value);
        record.add("truncation_depth", static_cast<long long>(draws[i].truncation_depth));
        record.add("error_bound", draws[i].error_bound);
        file.add(record);
        stats.add(draws[i].value);
        worst_bound = std::max(worst_bound, draws[i].error_bound);
    }
    file.write();
    std::cout << "sample: " << samples << " draws of " << family_kind << "(u=" << u
              << ", p=" << p << ") via " << method << ", mean "
              << fifs::format_double(stats.mean()) << " +/- "
              << fifs::format_double(stats.stderror()) << ", certified bound <= "
              << fifs::format_double(worst_bound) << " -> " << file.path() << "\n";
    return 0;
}

void write_cdf_file(double u, double p, const fifs::EnumerationBudget& budget,
                    const fifs::EnumerationOptions& options, const std::string& out,
                    const std::string& format) {
    const auto points = fifs::enumerate_d(u, p, budget, options);
    OutputFile file(out, format);
    for (const auto& pt : points) {
        fifs::Record record;
        record.add("u", u);
        record.add("p", p);
        record.add("y", pt.y);
        record.add("g", pt.g);
        record.add("code", pt.code.str());
        file.add(record);
    }
    file.write();
    std::cout << "cdf: " << points.size() << " points of G_u at u=" << u << ", p=" << p
              << " -> " << out << "\n";
}

int run_cdf(double u, double p, int max_m, int max_n, double resolution, const std::string& out,
            const CommonOpts& common) {
    write_cdf_file(u, p, {max_m, max_n}, {resolution}, out, common.format);
    return 0;
}

int run_moments(double u, double p, int kmax, const std::string& out,
                const CommonOpts& common) {
    const fifs::MomentTable table = fifs::moments(u, p, kmax);
    for (int k = 1; k <= kmax; ++k)
        std::cout << fifs::format_double(table.moment(k)) << "\n";
    if (!out.empty()) {
        OutputFile file(out, common.format);
        for (int k = 0; k <= kmax; ++k) {
            fifs::Record record;
            record.add("k", static_cast<long long>(k));
            record.add("moment", table.moment(k));
            file.add(record);
        }
        file.write();
    }
    return 0;
}

int run_single_site(double p, int grid_points, const std::string& out,
                    const CommonOpts& common) {
    OutputFile file(out, common.format);
    for (int i = 0; i <= grid_points + 1; ++i) {
        const double u = static_cast<double>(i) / (grid_points + 1);
        fifs::Record record;
        record.add("u", u);
        record.add("F", fifs::single_site_cdf(p, u));
        record.add("f", fifs::single_site_density(p, u));
        file.add(record);
    }
    file.write();
    std::cout << "single-site: F_p and f_p at p=" << p << " on " << (grid_points + 2)
              << " points -> " << file.path() << "\n";
    return 0;
}

int run_exponents(double u, double p, std::size_t samples, int depth, const std::string& code_text,
                  const std::string& out, const CommonOpts& common) {
    fifs::DCode code;
    {
        std::string item;
        std::stringstream ss(code_text);
        while (std::getline(ss, item, '-'))
            code.push_back(static_cast<std::uint16_t>(std::stoul(item)));
    }
    const fifs::DPointExponents sides = fifs::d_point_exponents(code, u, p);
    const fifs::ValueWithError ae_mc =
        fifs::empirical_exponent(u, p, samples, depth, common.resolve_seed());

    OutputFile file(out, common.format);
    fifs::Record right;
    right.add("u", u).add("p", p).add("side", "right");
    right.add("theoretical", sides.right_theory);
    right.add("empirical", sides.right_slope);
    right.add("stderr", 0.0);
    file.add(right);
    fifs::Record left;
    left.add("u", u).add("p", p).add("side", "left");
    left.add("theoretical", sides.left_theory);
    left.add("empirical", sides.left_slope);
    left.add("stderr", 0.0);
    file.add(left);
    fifs::Record ae;
    ae.add("u", u).add("p", p).add("side", "ae");
    ae.add("theoretical", fifs::ae_exponent(u, p));
    ae.add("empirical", ae_mc.value);
    ae.add("stderr", ae_mc.stderror);
    file.add(ae);
    file.write();
    std::cout << "exponents: ae " << fifs::format_double(ae_mc.value) << " vs "
              << fifs::format_double(fifs::ae_exponent(u, p)) << " (d-point code " << code.str()
              << ") -> " << file.path() << "\n";
    return 0;
}

int run_fig1(double p, std::vector<double> u_values, int max_m, int max_n, double resolution,
             const std::string& prefix, const CommonOpts& common) {
    for (double u : u_values) {
        const std::string path = prefix + "_u" + fifs::format_double(u) +
                                 (common.format == "json" ? ".json" : ".csv");
        write_cdf_file(u, p, {max_m, max_n}, {resolution}, path, common.format);
    }
    return 0;
}

int run_fig2(double p, int points, const std::string& out, const CommonOpts& common) {
    std::vector<double> grid;
    for (int i = 1; i <= points; ++i) grid.push_back(static_cast<double>(i) / (points + 1));
    OutputFile file(out, common.format);
    for (const fifs::Fig2Row& row : fifs::figure2_data(p, grid)) {
        fifs::Record record;
        record.add("u", row.u);
        record.add("d_exponent_min", row.d_exponent_min);
        record.add("ae_exponent", row.ae);
        file.add(record);
    }
    file.write();
    std::cout << "fig2: local exponent curves at p=" << p << " -> " << file.path() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify: the cross-module invariant battery
// ---------------------------------------------------------------------------

int run_verify(double u, double p, const CommonOpts& common) {
    const std::uint64_t seed = common.resolve_seed();
    int failures = 0;
    auto check = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << ": " << detail << "\n";
        if (!ok) ++failures;
    };

    const fifs::AffineFamily family = fifs::AffineFamily::fitness(u, p);

    {  // pathwise reversal identity
        fifs::Rng rng(fifs::derive_seed(seed, 1));
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<std::size_t> word(16);
            for (auto& j : word) j = family.draw_index(rng);
            const double theta0 = fifs::uniform01(rng);
            fifs::ChainState state{theta0, 0};
            for (std::size_t j : word) state = fifs::forward_step(state, family, j);
            std::vector<std::size_t> rev(word.rbegin(), word.rend());
            worst = std::max(worst, std::fabs(state.value -
                                              fifs::reversed_partial_sum(family, rev, theta0)));
        }
        check("reversal-identity", worst <= 1e-13,
              "max |forward - reversed| = " + fifs::format_double(worst));
    }

    const auto points = fifs::enumerate_d(u, p, {8, 16}, {0.0});
    {  // CDF monotonicity on D
        double worst_dip = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i)
            worst_dip = std::max(worst_dip, points[i - 1].g - points[i].g);
        check("cdf-monotone-on-D", worst_dip <= 1e-13,
              std::to_string(points.size()) + " points, worst dip " +
                  fifs::format_double(worst_dip));
    }
    {  // scaling/shifting functional equations
        const fifs::FunctionalEqReport report =
            fifs::verify_functional_equations(u, p, points);
        check("functional-equations", report.violations == 0,
              std::to_string(report.checked) + " points, max error " +
                  fifs::format_double(std::max(report.max_scaling_error,
                                               report.max_shifting_error)));
    }
    {  // G_u(u^n) = p^n
        double worst = 0.0;
        for (int n = 0; n <= 16; ++n) {
            const fifs::CdfBracket bracket =
                fifs::cdf_bracket(points, std::pow(u, n));
            worst = std::max(worst, std::fabs(bracket.lower - std::pow(p, n)));
            worst = std::max(worst, bracket.upper - bracket.lower);
        }
        check("power-identity", worst <= 1e-13, "max error " + fifs::format_double(worst));
    }
    if (std::fabs(u - p) <= 1e-12) {
        double worst = 0.0;
        for (const auto& pt : points) worst = std::max(worst, std::fabs(pt.g - pt.y));
        check("uniform-collapse", worst <= 1e-12, "max |g - y| = " + fifs::format_double(worst));
    }
    {  // moments vs Monte Carlo
        const fifs::MomentTable table = fifs::moments(u, p, 2);
        const auto draws = fifs::sample_limit_batch(family, 1e-8, 20000,
                                                    fifs::derive_seed(seed, 2), common.jobs);
        fifs::RunningStats m1, m2;
        for (const auto& s : draws) {
            m1.add(s.value);
            m2.add(s.value * s.value);
        }
        const bool ok1 = std::fabs(m1.mean() - table.moment(1)) <= 3.0 * m1.stderror();
        const bool ok2 = std::fabs(m2.mean() - table.moment(2)) <= 3.0 * m2.stderror();
        check("moments-vs-mc", ok1 && ok2,
              "m1 " + fifs::format_double(m1.mean()) + " vs " +
                  fifs::format_double(table.moment(1)) + ", m2 " +
                  fifs::format_double(m2.mean()) + " vs " +
                  fifs::format_double(table.moment(2)));
    }
    {  // distributional fixed point
        const auto base = fifs::sample_limit_batch(family, 1e-8, 50000,
                                                   fifs::derive_seed(seed, 3), common.jobs);
        std::vector<double> pushed, fresh;
        pushed.reserve(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            fifs::Rng rng = fifs::derive_stream(fifs::derive_seed(seed, 4), fifs::kTagSample, i);
            pushed.push_back(family.map(family.draw_index(rng))(base[i].value));
        }
        for (const auto& s : fifs::sample_limit_batch(family, 1e-8, 50000,
                                                      fifs::derive_seed(seed, 5), common.jobs))
            fresh.push_back(s.value);
        const double d = fifs::ks_two_sample_statistic(pushed, fresh);
        check("fixed-point-law", fifs::ks_two_sample_passes(d, pushed.size(), fresh.size(), 0.01),
              "two-sample KS = " + fifs::format_double(d));
    }
    {  // series sampler vs geometric-clock sampler
        std::vector<double> a, b;
        for (const auto& s : fifs::sample_limit_batch(family, 1e-8, 50000,
                                                      fifs::derive_seed(seed, 6), common.jobs))
            a.push_back(s.value);
        for (const auto& s : fifs::sample_limit_geometric_batch(
                 family, 64, 50000, fifs::derive_seed(seed, 7), common.jobs))
            b.push_back(s.value);
        const double d = fifs::ks_two_sample_statistic(a, b);
        check("sampler-equivalence", fifs::ks_two_sample_passes(d, a.size(), b.size(), 0.01),
              "two-sample KS = " + fifs::format_double(d));
    }
    {  // truncation certificate
        bool ok = true;
        std::string detail;
        for (long t : {5L, 10L}) {
            fifs::RunningStats gap;
            for (std::size_t i = 0; i < 5000; ++i) {
                fifs::Rng rng = fifs::derive_stream(fifs::derive_seed(seed, 8), fifs::kTagSample, i);
                double sum = 0.0, prod = 1.0, sum_t = 0.0;
                for (long s = 0; s < t + 50; ++s) {
                    if (s == t) sum_t = sum;
                    const fifs::AffineMap& m = family.map(family.draw_index(rng));
                    sum += m.a * prod;
                    prod *= m.b;
                }
                gap.add(std::fabs(sum - sum_t));
            }
            const double bound = fifs::truncation_bound(family.rho(), t);
            ok = ok && gap.mean() <= bound + 3.0 * gap.stderror();
            detail += "t=" + std::to_string(t) + ": " + fifs::format_double(gap.mean()) +
                      " <= " + fifs::format_double(bound) + "  ";
        }
        check("truncation-certificate", ok, detail);
    }
    {  // digit law of located samples
        const fifs::DigitLawReport report =
            fifs::digit_law_check(u, p, 20000, 20, fifs::derive_seed(seed, 9));
        check("digit-law", report.marginal_ok && report.pairs_ok && report.mass_identity_ok,
              "ones frequency " + fifs::format_double(report.ones_frequency) + ", chi2 " +
                  fifs::format_double(report.chi2_marginal) + " / " +
                  fifs::format_double(report.chi2_pairs));
    }
    {  // empirical local exponent
        const double target = fifs::ae_exponent(u, p);
        const fifs::ValueWithError est =
            fifs::empirical_exponent(u, p, 5000, 50, fifs::derive_seed(seed, 10));
        check("local-exponent", std::fabs(est.value - target) / target <= 0.05,
              fifs::format_double(est.value) + " vs " + fifs::format_double(target));
    }
    {  // particle coupling
        fifs::ModelParams params{p, 20000, fifs::derive_seed(seed, 11), 50};
        const fifs::CouplingTrace trace = fifs::coupled_run(params, {u});
        check("coupling", trace.max_deviation <= 0.02,
              "max deviation " + fifs::format_double(trace.max_deviation));
    }
    {  // interval partition
        const auto cells = fifs::interval_partition(u, 12);
        double length_sum = 0.0, mass_sum = 0.0;
        for (const auto& cell : cells) {
            length_sum += cell.length(u);
            mass_sum += cell.mass(p);
        }
        check("interval-partition",
              std::fabs(length_sum - 1.0) <= 1e-12 && std::fabs(mass_sum - 1.0) <= 1e-12,
              "sum lengths " + fifs::format_double(length_sum) + ", sum masses " +
                  fifs::format_double(mass_sum));
    }
    {  // joint moment reductions
        const std::vector<double> single{u}, pair{u, u};
        const fifs::ValueWithError j1 = fifs::joint_moment(p, single, 20000, 1e-8,
                                                           fifs::derive_seed(seed, 12));
        const fifs::ValueWithError j2 = fifs::joint_moment(p, pair, 20000, 1e-8,
                                                           fifs::derive_seed(seed, 13));
        const fifs::MomentTable table = fifs::moments(u, p, 2);
        const bool ok = std::fabs(j1.value - table.moment(1)) <= 3.0 * j1.stderror &&
                        std::fabs(j2.value - table.moment(2)) <= 3.0 * j2.stderror;
        check("joint-moments", ok,
              "E[X] " + fifs::format_double(j1.value) + ", E[X^2] " +
                  fifs::format_double(j2.value));
    }

    if (failures > 0) {
        std::cout << failures << " check(s) failed\n";
        return 3;
    }
    std::cout << "all checks passed (u=" << u << ", p=" << p << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and exact computation for the shared-environment fitness model "
                 "and its self-affine empirical-CDF chain"};
    app.require_subcommand(1);

    // simulate ---------------------------------------------------------
    auto* simulate_cmd = app.add_subcommand("simulate", "Run the N-site fitness process");
    struct {
        double p = 0.4;
        int sites = 100;
        int horizon = 100;
        std::string init = "uniform";
        std::string out = "simulate.csv";
        CommonOpts common;
    } sim;
    simulate_cmd->add_option("--p", sim.p, "Good-environment probability (B=1 -> max update)")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    simulate_cmd->add_option("--n", sim.sites, "Number of sites")->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate_cmd->add_option("--horizon", sim.horizon, "Steps to simulate")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    simulate_cmd->add_option("--init", sim.init, "uniform | const:<x> | explicit:<x,y,...>")
        ->capture_default_str();
    simulate_cmd->add_option("--out", sim.out, "Output path")->capture_default_str();
    add_common(simulate_cmd, sim.common);

    // couple ------------------------------------------------------------
    auto* couple_cmd = app.add_subcommand(
        "couple", "Track empirical fractions against the two-map recursion");
    struct {
        double p = 0.4;
        int sites = 100000;
        int horizon = 100;
        std::vector<double> u{0.25, 0.5, 0.75};
        std::string out = "couple.csv";
        CommonOpts common;
    } cpl;
    couple_cmd->add_option("--p", cpl.p, "Good-environment probability")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    couple_cmd->add_option("--n", cpl.sites, "Number of sites")->check(CLI::PositiveNumber)
        ->capture_default_str();
    couple_cmd->add_option("--horizon", cpl.horizon, "Steps to simulate")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    couple_cmd->add_option("--u", cpl.u, "Comma-separated level grid (default 0.25,0.5,0.75)")
        ->delimiter(',');
    couple_cmd->add_option("--out", cpl.out, "Output path")->capture_default_str();
    add_common(couple_cmd, cpl.common);

    // sample -------------------------------------------------------------
    auto* sample_cmd = app.add_subcommand("sample", "Draw stationary-law samples");
    struct {
        double p = 0.4;
        double u = 0.5;
        std::string family = "fitness";
        std::string method = "series";
        double epsilon = 1e-8;
        long kmax = 64;
        std::size_t samples = 10000;
        std::string out = "samples.csv";
        CommonOpts common;
    } smp;
    sample_cmd->add_option("--p", smp.p, "Map-selection probability p")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    sample_cmd->add_option("--u", smp.u, "Level u in (0,1)")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    sample_cmd->add_option("--family", smp.family, "fitness | erdos (map 0 is the scaling map of "
                           "the fitness preset with probability p)")
        ->check(CLI::IsMember({"fitness", "erdos"}))->capture_default_str();
    sample_cmd->add_option("--method", smp.method, "series | geometric")
        ->check(CLI::IsMember({"series", "geometric"}))->capture_default_str();
    sample_cmd->add_option("--epsilon", smp.epsilon, "Certified truncation error (series)")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sample_cmd->add_option("--kmax", smp.kmax, "Clock terms (geometric)")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sample_cmd->add_option("--samples", smp.samples, "Number of draws")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sample_cmd->add_option("--out", smp.out, "Output path")->capture_default_str();
    add_common(sample_cmd, smp.common);

    // cdf ------------------------------------------------------------------
    auto* cdf_cmd = app.add_subcommand("cdf", "Exact CDF grid on the dense set D");
    struct {
        double p = 0.4;
        double u = 0.3;
        int max_m = 12;
        int max_n = 25;
        double resolution = 1e-6;
        std::string out = "cdf.csv";
        CommonOpts common;
    } cdf;
    cdf_cmd->add_option("--p", cdf.p, "Environment probability")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    cdf_cmd->add_option("--u", cdf.u, "Level u in (0,1)")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    cdf_cmd->add_option("--max-m", cdf.max_m, "Maximum number of code terms")
        ->check(CLI::Range(1, 31))->capture_default_str();
    cdf_cmd->add_option("--max-n", cdf.max_n, "Maximum exponent")
        ->check(CLI::Range(0, 60000))->capture_default_str();
    cdf_cmd->add_option("--resolution", cdf.resolution,
                        "Grid resolution floor; 0 enumerates the budget exactly")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    cdf_cmd->add_option("--out", cdf.out, "Output path")->capture_default_str();
    add_common(cdf_cmd, cdf.common);

    // moments ---------------------------------------------------------------
    auto* moments_cmd = app.add_subcommand("moments", "Exact stationary moments");
    struct {
        double p = 0.4;
        double u = 0.5;
        int kmax = 1;
        std::string out;
        CommonOpts common;
    } mom;
    moments_cmd->add_option("--p", mom.p, "Environment probability")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    moments_cmd->add_option("--u", mom.u, "Level u in (0,1)")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    moments_cmd->add_option("--kmax", mom.kmax, "Highest moment order")
        ->check(CLI::PositiveNumber)->capture_default_str();
    moments_cmd->add_option("--out", mom.out, "Optional CSV/JSON path");
    add_common(moments_cmd, mom.common);

    // single-site -------------------------------------------------------------
    auto* single_cmd = app.add_subcommand("single-site", "Stationary single-site CDF and density");
    struct {
        double p = 0.4;
        int grid = 99;
        std::string out = "single_site.csv";
        CommonOpts common;
    } sst;
    single_cmd->add_option("--p", sst.p, "Environment probability")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    single_cmd->add_option("--grid", sst.grid, "Interior grid points")
        ->check(CLI::PositiveNumber)->capture_default_str();
    single_cmd->add_option("--out", sst.out, "Output path")->capture_default_str();
    add_common(single_cmd, sst.common);

    // exponents ----------------------------------------------------------------
    auto* exp_cmd = app.add_subcommand("exponents", "Local exponents of the stationary measure");
    struct {
        double p = 0.4;
        double u = 0.3;
        std::size_t samples = 10000;
        int depth = 50;
        std::string code = "1-1";
        std::string out = "exponents.csv";
        CommonOpts common;
    } expn;
    exp_cmd->add_option("--p", expn.p, "Environment probability")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    exp_cmd->add_option("--u", expn.u, "Level u in (0,1)")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    exp_cmd->add_option("--samples", expn.samples, "Monte Carlo sample count")
        ->check(CLI::PositiveNumber)->capture_default_str();
    exp_cmd->add_option("--depth", expn.depth, "Interval depth t")
        ->check(CLI::Range(1, 200))->capture_default_str();
    exp_cmd->add_option("--code", expn.code, "Dash-joined D-point code (m >= 2)")
        ->capture_default_str();
    exp_cmd->add_option("--out", expn.out, "Output path")->capture_default_str();
    add_common(exp_cmd, expn.common);

    // fig1 / fig2 -----------------------------------------------------------------
    auto* fig1_cmd = app.add_subcommand("fig1", "CDF grids for a list of levels, one file per u");
    struct {
        double p = 0.4;
        std::vector<double> u{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        int max_m = 12;
        int max_n = 25;
        double resolution = 1e-6;
        std::string prefix = "fig1";
        CommonOpts common;
    } fig1;
    fig1_cmd->add_option("--p", fig1.p, "Environment probability")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    fig1_cmd->add_option("--u", fig1.u, "Comma-separated levels (default 0.1..0.9)")
        ->delimiter(',');
    fig1_cmd->add_option("--max-m", fig1.max_m, "Maximum number of code terms")
        ->check(CLI::Range(1, 31))->capture_default_str();
    fig1_cmd->add_option("--max-n", fig1.max_n, "Maximum exponent")
        ->check(CLI::Range(0, 60000))->capture_default_str();
    fig1_cmd->add_option("--resolution", fig1.resolution, "Grid resolution floor")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    fig1_cmd->add_option("--out-prefix", fig1.prefix, "Output file prefix")->capture_default_str();
    add_common(fig1_cmd, fig1.common);

    auto* fig2_cmd = app.add_subcommand("fig2", "Local exponent curves over a u-grid");
    struct {
        double p = 0.4;
        int points = 99;
        std::string out = "fig2.csv";
        CommonOpts common;
    } fig2;
    fig2_cmd->add_option("--p", fig2.p, "Environment probability")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    fig2_cmd->add_option("--points", fig2.points, "Interior grid points")
        ->check(CLI::PositiveNumber)->capture_default_str();
    fig2_cmd->add_option("--out", fig2.out, "Output path")->capture_default_str();
    add_common(fig2_cmd, fig2.common);

    // verify -----------------------------------------------------------------------
    auto* verify_cmd = app.add_subcommand("verify", "Run the cross-module invariant battery");
    struct {
        double p = 0.4;
        double u = 0.3;
        CommonOpts common;
    } ver;
    verify_cmd->add_option("--p", ver.p, "Environment probability")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    verify_cmd->add_option("--u", ver.u, "Level u in (0,1)")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    add_common(verify_cmd, ver.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (simulate_cmd->parsed())
            return run_simulate(sim.p, sim.sites, sim.horizon, sim.init, sim.out, sim.common);
        if (couple_cmd->parsed())
            return run_couple(cpl.p, cpl.sites, cpl.horizon, cpl.u, cpl.out, cpl.common);
        if (sample_cmd->parsed())
            return run_sample(smp.p, smp.u, smp.family, smp.method, smp.epsilon, smp.kmax,
                              smp.samples, smp.out, smp.common);
        if (cdf_cmd->parsed())
            return run_cdf(cdf.u, cdf.p, cdf.max_m, cdf.max_n, cdf.resolution, cdf.out,
                           cdf.common);
        if (moments_cmd->parsed())
            return run_moments(mom.u, mom.p, mom.kmax, mom.out, mom.common);
        if (single_cmd->parsed())
            return run_single_site(sst.p, sst.grid, sst.out, sst.common);
        if (exp_cmd->parsed())
            return run_exponents(expn.u, expn.p, expn.samples, expn.depth, expn.code, expn.out,
                                 expn.common);
        if (fig1_cmd->parsed())
            return run_fig1(fig1.p, fig1.u, fig1.max_m, fig1.max_n, fig1.resolution, fig1.prefix,
                            fig1.common);
        if (fig2_cmd->parsed())
            return run_fig2(fig2.p, fig2.points, fig2.out, fig2.common);
        if (verify_cmd->parsed())
            return run_verify(ver.u, ver.p, ver.common);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
