#pragma once

// The dense set D where the stationary CDF G_u has a closed form.
//
// A point of D is coded by exponents (n_1, ..., n_m):
//   y = sum_{l=1..m} u^{n_l} (1-u)^{l-1},     G_u(y) = sum_{l=1..m} p^{n_l} (1-p)^{l-1}
// subject to: m = 1 -> n_1 >= 0; m > 1 -> n_1, ..., n_{m-1} >= 1 nondecreasing
// and n_{m-1} <= n_m + 1, n_m >= 0. Codes with a trailing infinite exponent
// contribute nothing to either sum, so finite codes cover all of D.
//
// Enumeration walks nondecreasing "middle" chains depth-first and attaches
// every admissible final exponent. The full code set explodes
// combinatorially (budget (12,25) holds ~2.45e9 codes), so the walk takes a
// resolution floor: a subtree whose total remaining mass cannot exceed the
// floor is represented by its root point, which is itself a D-point emitted
// one level up. Every omitted code then lies within resolution/u of an
// emitted point, and every emitted (y, g) pair is exact. resolution = 0
// disables the pruning and enumerates the budget exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fitness_ifs {

/// Fixed-capacity exponent list (n_1, ..., n_m).
class DCode {
public:
    static constexpr std::size_t kMaxLen = 32;

    DCode() = default;

    DCode(std::initializer_list<std::uint16_t> exps) {
        for (std::uint16_t n : exps) push_back(n);
    }

    std::size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }
    std::uint16_t operator[](std::size_t i) const { return exps_[i]; }

    void push_back(std::uint16_t n) {
        if (len_ >= kMaxLen) throw std::length_error("DCode: exceeds capacity");
        exps_[len_++] = n;
    }

    void pop_back() {
        if (len_ == 0) throw std::length_error("DCode: pop on empty code");
        --len_;
    }

    const std::uint16_t* begin() const { return exps_.data(); }
    const std::uint16_t* end() const { return exps_.data() + len_; }

    friend bool operator==(const DCode& a, const DCode& b) {
        return a.len_ == b.len_ && std::equal(a.begin(), a.end(), b.begin());
    }

    friend bool lex_less(const DCode& a, const DCode& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }

    /// Dash-joined exponents, e.g. "1-1-3".
    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < len_; ++i) {
            if (i) s += '-';
            s += std::to_string(exps_[i]);
        }
        return s;
    }

private:
    std::array<std::uint16_t, kMaxLen> exps_{};
    std::uint8_t len_ = 0;
};

/// Checks the admissibility constraints on an exponent code.
inline bool is_valid_code(const DCode& code) {
    const std::size_t m = code.size();
    if (m == 0 || m > DCode::kMaxLen) return false;
    if (m == 1) return true;  // n_1 >= 0 always holds for unsigned exponents
    for (std::size_t l = 0; l + 1 < m; ++l) {
        if (code[l] < 1) return false;
        if (l + 2 < m && code[l] > code[l + 1]) return false;
    }
    return code[m - 2] <= code[m - 1] + 1;
}

namespace detail {

/// Compensated (Kahan) accumulation, used for long codes.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

inline double code_sum(const DCode& code, double base) {
    const double cobase = 1.0 - base;
    if (code.size() <= 8) {
        double sum = 0.0;
        double w = 1.0;
        for (std::uint16_t n : code) {
            sum += std::pow(base, static_cast<double>(n)) * w;
            w *= cobase;
        }
        return sum;
    }
    KahanSum acc;
    double w = 1.0;
    for (std::uint16_t n : code) {
        acc.add(std::pow(base, static_cast<double>(n)) * w);
        w *= cobase;
    }
    return acc.sum;
}

}  // namespace detail

/// y-coordinate of a code at parameter u.
inline double code_y(const DCode& code, double u) { return detail::code_sum(code, u); }

/// Exact CDF value G_u(y) of a code at environment probability p.
inline double code_g(const DCode& code, double p) { return detail::code_sum(code, p); }

/// A D-point: exponent code with its location y and exact CDF value g.
struct DPoint {
    double y = 0.0;
    double g = 0.0;
    DCode code;
};

struct EnumerationBudget {
    int max_m = 12;
    int max_n = 25;

    void validate() const {
        if (max_m < 1 || static_cast<std::size_t>(max_m) + 1 > DCode::kMaxLen)
            throw std::invalid_argument("EnumerationBudget: max_m out of range");
        if (max_n < 0 || max_n > 60000)
            throw std::invalid_argument("EnumerationBudget: max_n out of range");
    }
};

struct EnumerationOptions {
    /// Subtrees spanning less than this mass collapse onto their root point;
    /// 0 enumerates the budget exactly.
    double resolution = 1e-7;
    /// Hard cap on emitted points; exceeded -> EnumerationOverflowError.
    std::size_t max_points = 100000000;
    /// |dy| tolerance under which two codes count as the same point.
    double dedup_y_tol = 1e-13;
    /// Required agreement of g across merged duplicates.
    double dedup_g_tol = 1e-12;
};

class EnumerationOverflowError : public std::runtime_error {
public:
    explicit EnumerationOverflowError(std::size_t limit)
        : std::runtime_error("enumerate_d: more than " + std::to_string(limit) +
                             " points; raise max_points, shrink the budget, or coarsen "
                             "the resolution"),
          max_points(limit) {}

    std::size_t max_points;
};

/// Visit every enumerated code as (y, g, code) without materializing.
template <typename Emit>
void visit_d(double u, double p, const EnumerationBudget& budget,
             const EnumerationOptions& options, Emit&& emit) {
    if (!(u > 0.0) || !(u < 1.0)) throw std::invalid_argument("visit_d: u must lie in (0,1)");
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("visit_d: p must lie in (0,1)");
    budget.validate();

    const int max_m = budget.max_m;
    const int max_n = budget.max_n;
    std::vector<double> upow(static_cast<std::size_t>(max_n) + 2);
    std::vector<double> ppow(static_cast<std::size_t>(max_n) + 2);
    for (int n = 0; n <= max_n + 1; ++n) {
        upow[static_cast<std::size_t>(n)] = std::pow(u, n);
        ppow[static_cast<std::size_t>(n)] = std::pow(p, n);
    }
    std::vector<double> couw(static_cast<std::size_t>(max_m) + 1);
    std::vector<double> copw(static_cast<std::size_t>(max_m) + 1);
    for (int l = 0; l <= max_m; ++l) {
        couw[static_cast<std::size_t>(l)] = std::pow(1.0 - u, l);
        copw[static_cast<std::size_t>(l)] = std::pow(1.0 - p, l);
    }
    const double floor_mass = options.resolution;
    // Continuations of a chain ending in exponent v at length l stay within
    // u^v (1-u)^l (1 + (1-u)/u^2) of the chain point.
    const double span_factor = 1.0 + (1.0 - u) / (u * u);

    std::size_t emitted = 0;
    auto emit_point = [&](double y, double g, const DCode& code) {
        if (++emitted > options.max_points) throw EnumerationOverflowError(options.max_points);
        emit(y, g, code);
    };

    DCode chain;

    // Codes of length 1; these form the coarse skeleton {u^n} and are always
    // kept in full so that every power of u up to the budget is available.
    for (int n = 0; n <= max_n; ++n) {
        chain.push_back(static_cast<std::uint16_t>(n));
        emit_point(upow[static_cast<std::size_t>(n)], ppow[static_cast<std::size_t>(n)], chain);
        chain.pop_back();
    }
    if (max_m == 1) return;

    // Depth-first walk over nondecreasing middle chains. At each chain of
    // length l we attach final exponents n_m in {last-1, ..., max_n}.
    std::function<void(int, int, double, double)> walk = [&](int l, int last, double y, double g) {
        const int first_final = last > 0 ? last - 1 : 0;
        for (int n = first_final; n <= max_n; ++n) {
            const double term = upow[static_cast<std::size_t>(n)] * couw[static_cast<std::size_t>(l)];
            if (floor_mass > 0.0 && term <= floor_mass) break;
            chain.push_back(static_cast<std::uint16_t>(n));
            emit_point(y + term, g + ppow[static_cast<std::size_t>(n)] * copw[static_cast<std::size_t>(l)], chain);
            chain.pop_back();
        }
        if (l + 1 > max_m - 1) return;
        const int first_mid = last > 1 ? last : 1;
        for (int v = first_mid; v <= max_n; ++v) {
            const double head = upow[static_cast<std::size_t>(v)] * couw[static_cast<std::size_t>(l)];
            if (floor_mass > 0.0 && head * span_factor <= floor_mass) break;
            chain.push_back(static_cast<std::uint16_t>(v));
            walk(l + 1, v, y + head, g + ppow[static_cast<std::size_t>(v)] * copw[static_cast<std::size_t>(l)]);
            chain.pop_back();
        }
    };

    for (int v = 1; v <= max_n; ++v) {
        chain.push_back(static_cast<std::uint16_t>(v));
        walk(1, v, upow[static_cast<std::size_t>(v)], ppow[static_cast<std::size_t>(v)]);
        chain.pop_back();
    }
}

class CodeConsistencyError : public std::runtime_error {
public:
    CodeConsistencyError(const DPoint& a, const DPoint& b)
        : std::runtime_error("enumerate_d: codes " + a.code.str() + " and " + b.code.str() +
                             " coincide in y (" + std::to_string(a.y) + ") but disagree in g (" +
                             std::to_string(a.g) + " vs " + std::to_string(b.g) + ")") {}
};

/// Enumerate, sort by (y, code), and merge duplicate y values. Duplicates
/// must agree in g (continuity of G_u at multiply-coded points); a
/// disagreement beyond dedup_g_tol throws CodeConsistencyError.
inline std::vector<DPoint> enumerate_d(double u, double p,
                                       const EnumerationBudget& budget = {},
                                       const EnumerationOptions& options = {}) {
    std::size_t count = 0;
    visit_d(u, p, budget, options, [&](double, double, const DCode&) { ++count; });
    std::vector<DPoint> points;
    points.reserve(count);
    visit_d(u, p, budget, options,
            [&](double y, double g, const DCode& code) { points.push_back({y, g, code}); });

    std::sort(points.begin(), points.end(), [](const DPoint& a, const DPoint& b) {
        if (a.y != b.y) return a.y < b.y;
        return lex_less(a.code, b.code);
    });

    std::vector<DPoint> merged;
    merged.reserve(points.size());
    for (const DPoint& pt : points) {
        if (!merged.empty() && pt.y - merged.back().y <= options.dedup_y_tol) {
            if (std::fabs(pt.g - merged.back().g) > options.dedup_g_tol)
                throw CodeConsistencyError(merged.back(), pt);
            continue;  // keep the first representative (lowest y, lex-least code)
        }
        merged.push_back(pt);
    }
    return merged;
}

/// Closed bracket on G_u(x) from the nearest enumerated points around x.
struct CdfBracket {
    double lower = 0.0;
    double upper = 1.0;
    double y_lower = 0.0;  // location of the bracketing points
    double y_upper = 1.0;
};

/// Bracket G_u(x) using an already-enumerated, sorted point set.
inline CdfBracket cdf_bracket(std::span<const DPoint> points, double x,
                              double exact_tol = 1e-13) {
    if (!(x >= 0.0) || !(x <= 1.0))
        throw std::domain_error("cdf_bracket: x must lie in [0,1]");
    if (points.empty()) throw std::invalid_argument("cdf_bracket: empty point set");
    auto it = std::lower_bound(points.begin(), points.end(), x,
                               [](const DPoint& pt, double v) { return pt.y < v; });
    // exact hit within tolerance collapses the bracket
    if (it != points.end() && std::fabs(it->y - x) <= exact_tol)
        return {it->g, it->g, it->y, it->y};
    if (it != points.begin() && std::fabs(std::prev(it)->y - x) <= exact_tol) {
        const auto& pt = *std::prev(it);
        return {pt.g, pt.g, pt.y, pt.y};
    }
    CdfBracket bracket;
    if (it == points.begin()) {
        bracket.lower = 0.0;  // G_u(0) = 0
        bracket.y_lower = 0.0;
    } else {
        bracket.lower = std::prev(it)->g;
        bracket.y_lower = std::prev(it)->y;
    }
    if (it == points.end()) {
        bracket.upper = 1.0;  // G_u(1) = 1
        bracket.y_upper = 1.0;
    } else {
        bracket.upper = it->g;
        bracket.y_upper = it->y;
    }
    return bracket;
}

/// Bracket G_u(x), enumerating at the given budget.
inline CdfBracket cdf_bracket(double u, double p, double x,
                              const EnumerationBudget& budget = {},
                              const EnumerationOptions& options = {}) {
    const std::vector<DPoint> points = enumerate_d(u, p, budget, options);
    return cdf_bracket(points, x, options.dedup_y_tol);
}

/// Code of u*y: every exponent increments.
inline DCode scale_code(const DCode& code) {
    DCode out;
    for (std::uint16_t n : code) {
        if (n == 65535) throw std::overflow_error("scale_code: exponent overflow");
        out.push_back(static_cast<std::uint16_t>(n + 1));
    }
    return out;
}

/// Code of u + (1-u)*y: prepend exponent 1, shifting positions by one.
inline DCode shift_code(const DCode& code) {
    DCode out;
    out.push_back(1);
    for (std::uint16_t n : code) out.push_back(n);
    return out;
}

/// Report of the scaling / shifting functional-equation check
///   G_u(u y) = p G_u(y)   and   G_u(u + (1-u) y) = p + (1-p) G_u(y)
/// evaluated through exact code arithmetic on every supplied point.
struct FunctionalEqReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double max_scaling_error = 0.0;
    double max_shifting_error = 0.0;
    double tolerance = 0.0;
};

inline FunctionalEqReport verify_functional_equations(double u, double p,
                                                      std::span<const DPoint> points,
                                                      double tolerance = 1e-12) {
    FunctionalEqReport report;
    report.tolerance = tolerance;
    for (const DPoint& pt : points) {
        const DCode scaled = scale_code(pt.code);
        const DCode shifted = shift_code(pt.code);
        if (!is_valid_code(scaled) || !is_valid_code(shifted))
            throw std::logic_error("verify_functional_equations: transformed code inadmissible");
        const double scaling_err = std::fabs(code_g(scaled, p) - p * pt.g);
        const double shifting_err = std::fabs(code_g(shifted, p) - (p + (1.0 - p) * pt.g));
        const double scaling_y_err = std::fabs(code_y(scaled, u) - u * pt.y);
        const double shifting_y_err = std::fabs(code_y(shifted, u) - (u + (1.0 - u) * pt.y));
        report.max_scaling_error = std::max(report.max_scaling_error,
                                            std::max(scaling_err, scaling_y_err));
        report.max_shifting_error = std::max(report.max_shifting_error,
                                             std::max(shifting_err, shifting_y_err));
        if (scaling_err > tolerance || shifting_err > tolerance || scaling_y_err > tolerance ||
            shifting_y_err > tolerance)
            ++report.violations;
        ++report.checked;
    }
    return report;
}

}  // namespace fitness_ifs
