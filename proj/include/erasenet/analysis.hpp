#pragma once

// Closed-form per-user throughput curves: the long-network average delivery
// rate achieved by each scheme as a function of the link erasure probability
// p, plus curve utilities (TDMA envelope, convex mixtures, p -> 1 limits,
// crossover search).

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace erasenet {

enum class CurveTag { tau1, tau2, tau3, tau_tdma, thm4_bound, thm5_bound, convex_s2, convex_s4 };

// A curve identifier; n parameterises the convex-mixture families only.
struct CurveId {
    CurveTag tag;
    int n = 0;

    friend bool operator==(const CurveId& a, const CurveId& b) {
        return a.tag == b.tag && a.n == b.n;
    }
};

namespace detail {

inline void check_p(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p outside [0,1]");
}

inline double tau1_value(double p) {
    const double q = 1.0 - p;
    const double c = 1.0 - q * q;
    return 0.5 * (q + q * c * c) + 0.5 * c * std::pow(q, 5) / (1.0 + q * q);
}

inline double tau2_value(double p) {
    const double q = 1.0 - p;
    return (2.0 / 3.0) * q + (1.0 / 3.0) * p * q * (1.0 - q * q);
}

inline double tau3_value(double p) {
    const double q = 1.0 - p;
    return 0.5 * q + 0.25 * q * (1.0 - q * q) * (1.0 + p + q * q * q);
}

inline double thm4_value(double p) {
    const double q = 1.0 - p;
    const double a = p + 1.0 - q * q * (1.0 - p * q) - 0.5 * p * q;
    return 0.4 * q * (2.0 + a * p);
}

inline double thm5_value(double p) {
    const double q = 1.0 - p;
    const double q3 = q * q * q;
    const double b = 3.0 + (1.0 + q3) * (1.0 - q * q + p * q3) + p * (1.0 + q * q);
    return (1.0 / 3.0) * q * (1.0 + q3 + b * p);
}

}  // namespace detail

// Evaluates a throughput curve at erasure probability p.
inline double eval_curve(CurveId id, double p) {
    detail::check_p(p);
    switch (id.tag) {
        case CurveTag::tau1: return detail::tau1_value(p);
        case CurveTag::tau2: return detail::tau2_value(p);
        case CurveTag::tau3: return detail::tau3_value(p);
        case CurveTag::tau_tdma:
            return std::max({detail::tau1_value(p), detail::tau2_value(p),
                             detail::tau3_value(p)});
        case CurveTag::thm4_bound: return detail::thm4_value(p);
        case CurveTag::thm5_bound: return detail::thm5_value(p);
        case CurveTag::convex_s2: {
            if (id.n < 1) throw std::invalid_argument("convex_s2 needs n >= 1");
            const double w2 = (id.n % 2 == 1) ? 3.0 / (id.n + 2) : 2.0 / (id.n + 2);
            return (1.0 - w2) * detail::tau1_value(p) + w2 * detail::tau2_value(p);
        }
        case CurveTag::convex_s4: {
            if (id.n < 2) throw std::invalid_argument("convex_s4 needs n >= 2");
            const double w3 = 4.0 / (id.n + 2);
            return (1.0 - w3) * detail::tau1_value(p) + w3 * detail::tau3_value(p);
        }
    }
    throw std::invalid_argument("unsupported curve id");
}

// The four per-user degrees-of-freedom components whose average over 3 gives
// the thm5 curve: full service, one-sided service, and the two split-service
// events.  components[0] + ... + components[3] == 3 * thm5_bound(p).
inline std::array<double, 4> thm5_components(double p) {
    detail::check_p(p);
    const double q = 1.0 - p;
    const double d0 = q * (1.0 + p);
    const double d1 = 2.0 * p * q + std::pow(q, 4);
    const double d2_1 =
        p * q * (1.0 + q * q * q) * (1.0 - q * q + p * q * q * q);
    const double d2_2 = p * p * q * (1.0 + q * q);
    return {d0, d1, d2_1, d2_2};
}

// Limit of curve(p) / (1 - p) as p -> 1: how much better than plain TDMA the
// scheme stays when almost everything is erased.
inline double limit_ratio(CurveId id) {
    switch (id.tag) {
        case CurveTag::tau1:
        case CurveTag::tau2:
        case CurveTag::tau3: return 1.0;
        case CurveTag::thm4_bound: return 8.0 / 5.0;
        case CurveTag::thm5_bound: return 2.0;
        default:
            throw std::invalid_argument("no normalized limit recorded for this curve");
    }
}

// Bisection root of eval_curve(a, p) - eval_curve(b, p) on [lo, hi] to an
// absolute tolerance of 1e-9.  The bracket must show a sign change.
inline double find_crossover(CurveId a, CurveId b, double lo, double hi) {
    detail::check_p(lo);
    detail::check_p(hi);
    if (!(lo < hi)) throw std::invalid_argument("empty bracket");
    const auto f = [&](double p) { return eval_curve(a, p) - eval_curve(b, p); };
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) throw std::invalid_argument("no sign change");
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid > 0) == (flo > 0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Partial sum of the series form of tau1: the N leading stretch-length terms
// on top of the base term.  The dropped tail is below (1-p)^(4N).
inline double tau1_series_partial(double p, int n_terms) {
    detail::check_p(p);
    if (n_terms < 0) throw std::invalid_argument("negative term count");
    const double q = 1.0 - p;
    const double c = 1.0 - q * q;
    double sum = 0.5 * (q + q * c * c);
    double power = std::pow(q, 5);  // q^(4i+1) at i = 1
    for (int i = 1; i <= n_terms; ++i) {
        sum += 0.5 * c * c * power;
        power *= q * q * q * q;
    }
    return sum;
}

inline std::string curve_name(CurveId id) {
    switch (id.tag) {
        case CurveTag::tau1: return "tau1";
        case CurveTag::tau2: return "tau2";
        case CurveTag::tau3: return "tau3";
        case CurveTag::tau_tdma: return "tau_tdma";
        case CurveTag::thm4_bound: return "thm4";
        case CurveTag::thm5_bound: return "thm5";
        case CurveTag::convex_s2: return "convex_s2:" + std::to_string(id.n);
        case CurveTag::convex_s4: return "convex_s4:" + std::to_string(id.n);
    }
    return "?";
}

inline CurveId parse_curve(const std::string& name) {
    if (name == "tau1") return {CurveTag::tau1};
    if (name == "tau2") return {CurveTag::tau2};
    if (name == "tau3") return {CurveTag::tau3};
    if (name == "tau_tdma") return {CurveTag::tau_tdma};
    if (name == "thm4" || name == "thm4_bound") return {CurveTag::thm4_bound};
    if (name == "thm5" || name == "thm5_bound") return {CurveTag::thm5_bound};
    for (const char* prefix : {"convex_s2:", "convex_s4:"}) {
        const std::string pre(prefix);
        if (name.rfind(pre, 0) == 0) {
            int n;
            try {
                size_t used = 0;
                n = std::stoi(name.substr(pre.size()), &used);
                if (used != name.size() - pre.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw std::invalid_argument("bad mixture size in curve '" + name + "'");
            }
            return {pre == "convex_s2:" ? CurveTag::convex_s2 : CurveTag::convex_s4, n};
        }
    }
    throw std::invalid_argument(
        "unknown curve '" + name +
        "' (expected tau1|tau2|tau3|tau_tdma|thm4|thm5|convex_s2:<n>|convex_s4:<n>)");
}

}  // namespace erasenet
