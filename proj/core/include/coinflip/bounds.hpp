#pragma once

// Tight feasibility conditions for classical and quantum-resource coin
// flipping, plus the symmetric trade-off curves.

#include <cmath>
#include <string>
#include <vector>

#include <coinflip/types.hpp>

namespace coinflip {

enum class Setting : unsigned char { classical, quantum };

inline const char* to_string(Setting s) {
    return s == Setting::classical ? "classical" : "quantum";
}

inline Setting setting_from_string(const std::string& s) {
    if (s == "classical") return Setting::classical;
    if (s == "quantum") return Setting::quantum;
    throw ParseError("unknown setting '" + s + "'");
}

/// One checked inequality; violated means lhs > rhs beyond the mode
/// tolerance.
template <typename R>
struct Inequality {
    std::string name;
    R lhs;
    R rhs;
};

template <typename R>
struct FeasibilityVerdict {
    bool feasible = false;
    std::vector<Inequality<R>> violated;  // empty iff feasible
    std::string note;                     // achievability semantics, if any
};

/// Right-hand side of the trade-off inequality on p00 + p11:
///
///   p0s*ps0 + p1s*ps1 - max(0, p0s+p1s-1) * max(0, ps0+ps1-1).
///
/// Concave in (p0s, p1s) for fixed (ps0, ps1), nondecreasing in each
/// argument, and maps [0,1]^4 into [0,1].
template <typename R>
R classical_bound_rhs(const R& p0s, const R& p1s, const R& ps0, const R& ps1) {
    R excess_b = p0s + p1s - R(1);
    if (excess_b < R(0)) excess_b = R(0);
    R excess_a = ps0 + ps1 - R(1);
    if (excess_a < R(0)) excess_a = R(0);
    return R(p0s * ps0) + R(p1s * ps1) - R(excess_b * excess_a);
}

/// A coin flip has a classical protocol iff
///   p00 <= p0s*ps0,  p11 <= p1s*ps1,  p00 + p11 <= classical_bound_rhs.
template <typename R>
FeasibilityVerdict<R> classical_feasible(const CoinFlipSpec<R>& s) {
    FeasibilityVerdict<R> v;
    auto check = [&](const char* name, const R& lhs, const R& rhs) {
        if (!leq<R>(lhs, rhs)) v.violated.push_back(Inequality<R>{name, lhs, rhs});
    };
    check("p00 <= p0s*ps0", s.p00.value(), R(s.p0s.value() * s.ps0.value()));
    check("p11 <= p1s*ps1", s.p11.value(), R(s.p1s.value() * s.ps1.value()));
    check("p00 + p11 <= p0s*ps0 + p1s*ps1 - max(0,p0s+p1s-1)*max(0,ps0+ps1-1)",
          R(s.p00.value() + s.p11.value()),
          classical_bound_rhs<R>(s.p0s.value(), s.p1s.value(), s.ps0.value(), s.ps1.value()));
    v.feasible = v.violated.empty();
    return v;
}

/// A coin flip has a quantum protocol iff
///   p00 <= p0s*ps0,  p11 <= p1s*ps1,  p00 + p11 <= 1.
///
/// The predicate tests the closed region. On the boundary, achievability
/// holds with an arbitrarily small additive slack on the four cheating
/// caps; the verdict carries that semantics in its note.
template <typename R>
FeasibilityVerdict<R> quantum_feasible(const CoinFlipSpec<R>& s) {
    FeasibilityVerdict<R> v;
    auto check = [&](const char* name, const R& lhs, const R& rhs) {
        if (!leq<R>(lhs, rhs)) v.violated.push_back(Inequality<R>{name, lhs, rhs});
    };
    check("p00 <= p0s*ps0", s.p00.value(), R(s.p0s.value() * s.ps0.value()));
    check("p11 <= p1s*ps1", s.p11.value(), R(s.p1s.value() * s.ps1.value()));
    check("p00 + p11 <= 1", R(s.p00.value() + s.p11.value()), R(1));
    v.feasible = v.violated.empty();
    v.note = "achievable with arbitrarily small slack on the cheating caps";
    return v;
}

/// Symmetric trade-off curves: for a coin flip with honest distribution
/// ((1-a)/2, (1-a)/2, a) and all four cheating caps equal to p*, the best
/// achievable p* as a function of a. Floating-only: the curves involve
/// square roots.
enum class Curve : unsigned char { definitional, quantum, classical };

inline const char* to_string(Curve c) {
    switch (c) {
        case Curve::definitional: return "definitional";
        case Curve::quantum: return "quantum";
        default: return "classical";
    }
}

inline double symmetric_tradeoff(double a, Curve which) {
    if (!(a >= 0.0 && a <= 1.0)) throw PreconditionViolation("curve parameter outside [0,1]");
    switch (which) {
        case Curve::definitional:
            return (1.0 - a) / 2.0;
        case Curve::quantum:
            return std::sqrt((1.0 - a) / 2.0);
        default:
            // Below a = 1/2 the classical optimum is worse than the quantum
            // one; from a = 1/2 on the two coincide.
            return a < 0.5 ? 1.0 - std::sqrt(a / 2.0) : std::sqrt((1.0 - a) / 2.0);
    }
}

} // namespace coinflip
