#pragma once

// Shared domain types: parties, outcomes, probabilities, coin-flip
// specifications, and analysis results.

#include <string>
#include <utility>

#include <coinflip/arith.hpp>
#include <coinflip/errors.hpp>

namespace coinflip {

enum class Party : unsigned char { alice, bob };

inline Party other(Party p) { return p == Party::alice ? Party::bob : Party::alice; }

inline const char* to_string(Party p) { return p == Party::alice ? "alice" : "bob"; }

inline Party party_from_string(const std::string& s) {
    if (s == "alice") return Party::alice;
    if (s == "bob") return Party::bob;
    throw ParseError("unknown party '" + s + "'");
}

/// Common output of a finished protocol run. The dummy value is spelled
/// "abort" in all serialized forms.
enum class Outcome : unsigned char { zero, one, abort };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::zero: return "0";
        case Outcome::one: return "1";
        default: return "abort";
    }
}

inline Outcome outcome_from_string(const std::string& s) {
    if (s == "0") return Outcome::zero;
    if (s == "1") return Outcome::one;
    if (s == "abort") return Outcome::abort;
    throw ParseError("unknown outcome '" + s + "'");
}

/// A probability value in [0, 1].
///
/// Construction rejects values outside the range. In floating mode, values
/// within the mode tolerance of the range are clamped onto it, so that
/// quantities derived by rounding arithmetic (for example 1 - x/y with
/// x == y) stay constructible; anything further out is rejected.
template <typename R>
class Prob {
public:
    Prob() : v_(0) {}

    explicit Prob(R v) : v_(checked(std::move(v))) {}

    const R& value() const { return v_; }

    operator const R&() const { return v_; }

    friend bool operator==(const Prob& a, const Prob& b) { return a.v_ == b.v_; }

private:
    static R checked(R v) {
        if (!arith<R>::is_finite(v))
            throw ConstraintViolation("probability is not finite");
        const R t = arith<R>::tol();
        if (v < R(0) - t || v > R(1) + t)
            throw ConstraintViolation("probability " + arith<R>::str(v) + " outside [0,1]");
        if (v < R(0)) v = R(0);
        if (v > R(1)) v = R(1);
        return v;
    }

    R v_;
};

/// Six-parameter description of a generalized coin flip: the two honest
/// output rates and the four cheating caps.
///
///   p0s, p1s: a dishonest Bob makes honest Alice output 0 (resp. 1) with
///             probability at most p0s (resp. p1s);
///   ps0, ps1: a dishonest Alice makes honest Bob output 0 (resp. 1) with
///             probability at most ps0 (resp. ps1).
template <typename R>
struct CoinFlipSpec {
    Prob<R> p00, p11;
    Prob<R> p0s, p1s;
    Prob<R> ps0, ps1;
};

/// Validated constructor for CoinFlipSpec. Enforces, within the mode
/// tolerance:
///   p00 + p11 <= 1,  p00 <= min(p0s, ps0),  p11 <= min(p1s, ps1).
template <typename R>
CoinFlipSpec<R> make_spec(const R& p00, const R& p11, const R& p0s, const R& p1s,
                          const R& ps0, const R& ps1) {
    CoinFlipSpec<R> s{Prob<R>(p00), Prob<R>(p11), Prob<R>(p0s),
                      Prob<R>(p1s), Prob<R>(ps0), Prob<R>(ps1)};
    auto fail = [](const std::string& ineq, const R& lhs, const R& rhs) {
        throw ConstraintViolation("spec violates " + ineq + ": " + arith<R>::str(lhs) +
                                  " > " + arith<R>::str(rhs));
    };
    const R sum = R(s.p00.value() + s.p11.value());
    if (!leq<R>(sum, R(1))) fail("p00 + p11 <= 1", sum, R(1));
    if (!leq<R>(s.p00.value(), s.p0s.value())) fail("p00 <= p0s", s.p00.value(), s.p0s.value());
    if (!leq<R>(s.p00.value(), s.ps0.value())) fail("p00 <= ps0", s.p00.value(), s.ps0.value());
    if (!leq<R>(s.p11.value(), s.p1s.value())) fail("p11 <= p1s", s.p11.value(), s.p1s.value());
    if (!leq<R>(s.p11.value(), s.ps1.value())) fail("p11 <= ps1", s.p11.value(), s.ps1.value());
    return s;
}

/// Relabel the parties of a spec (Alice <-> Bob). The honest rates are
/// shared quantities; the two cap pairs trade places.
template <typename R>
CoinFlipSpec<R> swap_parties(const CoinFlipSpec<R>& s) {
    return CoinFlipSpec<R>{s.p00, s.p11, s.ps0, s.ps1, s.p0s, s.p1s};
}

/// Relabel the output values of a spec (0 <-> 1).
template <typename R>
CoinFlipSpec<R> flip_outputs(const CoinFlipSpec<R>& s) {
    return CoinFlipSpec<R>{s.p11, s.p00, s.p1s, s.p0s, s.ps1, s.ps0};
}

/// An unbalanced weak coin flip resource: Alice wins (common output 0) with
/// probability z when both parties are honest; a cheater can shift the win
/// probability in their own favor by at most eps, and may always lose
/// deliberately. As a coin flip it behaves as
/// CF(z, 1-z, 1, 1-z+eps, z+eps, 1), with the caps clamped into [0, 1].
template <typename R>
struct WcfSpec {
    Prob<R> z;
    Prob<R> eps;

    /// Highest Pr[Alice wins] a cheating Alice can reach: min(1, z + eps).
    R alice_cap() const {
        R v = z.value() + eps.value();
        return v > R(1) ? R(1) : v;
    }

    /// Lowest Pr[Alice wins] a cheating Bob can reach: max(0, z - eps).
    R bob_floor() const {
        R v = z.value() - eps.value();
        return v < R(0) ? R(0) : v;
    }
};

/// Exact honest output distribution of a protocol tree together with the
/// four optimal forcing probabilities.
///
///   force_a0, force_a1: best probability with which a dishonest Alice makes
///                       honest Bob output 0 (resp. 1);
///   force_b0, force_b1: the same for a dishonest Bob against honest Alice.
template <typename R>
struct AnalysisResult {
    Prob<R> p00, p11, abort;
    Prob<R> force_a0, force_a1;
    Prob<R> force_b0, force_b1;
};

template <typename R>
AnalysisResult<R> swap_parties(const AnalysisResult<R>& r) {
    return AnalysisResult<R>{r.p00,      r.p11,      r.abort,
                             r.force_b0, r.force_b1, r.force_a0, r.force_a1};
}

template <typename R>
AnalysisResult<R> flip_outputs(const AnalysisResult<R>& r) {
    return AnalysisResult<R>{r.p11,      r.p00,      r.abort,
                             r.force_a1, r.force_a0, r.force_b1, r.force_b0};
}

} // namespace coinflip
