#pragma once

// Arithmetic modes. Every quantity in the library is templated over the
// number type R, which is either mpq_class (exact rational mode) or double
// (floating mode with a fixed absolute tolerance). Fixing the mode at the
// type level means the two can never mix silently inside one computation.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <system_error>

#include <gmpxx.h>

#include <coinflip/errors.hpp>

namespace coinflip {

template <typename R>
struct arith;

template <>
struct arith<mpq_class> {
    static constexpr bool exact = true;
    static constexpr const char* name = "rational";

    static mpq_class tol() { return mpq_class(0); }
    static mpq_class tie_slack() { return mpq_class(0); }

    static bool is_finite(const mpq_class&) { return true; }

    static mpq_class ratio(long num, long den) {
        if (den == 0) throw ParseError("rational with zero denominator");
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    }

    static mpq_class from_double(double v) {
        if (!std::isfinite(v)) throw ParseError("rational from non-finite double");
        return mpq_class(v);
    }

    static double to_double(const mpq_class& v) { return v.get_d(); }

    /// Accepts "a/b" with decimal integers a, b, a plain integer, or a
    /// decimal literal such as "0.375" (parsed as an exact decimal fraction).
    static mpq_class parse(const std::string& s) {
        if (s.empty()) throw ParseError("empty number");
        if (s.find('/') != std::string::npos) {
            mpq_class q;
            if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
                throw ParseError("bad rational literal '" + s + "'");
            if (q.get_den() == 0)
                throw ParseError("rational with zero denominator '" + s + "'");
            q.canonicalize();
            return q;
        }
        // [sign] digits [ '.' digits ]
        std::size_t i = 0;
        bool neg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = (s[i++] == '-');
        std::string digits;
        std::size_t frac_len = 0;
        bool seen_dot = false;
        for (; i < s.size(); ++i) {
            if (s[i] == '.') {
                if (seen_dot) throw ParseError("bad decimal literal '" + s + "'");
                seen_dot = true;
            } else if (s[i] >= '0' && s[i] <= '9') {
                digits.push_back(s[i]);
                if (seen_dot) ++frac_len;
            } else {
                throw ParseError("bad decimal literal '" + s + "'");
            }
        }
        if (digits.empty()) throw ParseError("bad decimal literal '" + s + "'");
        mpz_class num(digits, 10);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
        mpq_class q(neg ? mpz_class(-num) : num, den);
        q.canonicalize();
        return q;
    }

    /// "a/b" for non-integers, plain integer text otherwise.
    static std::string str(const mpq_class& v) {
        if (v.get_den() == 1) return v.get_num().get_str();
        return v.get_num().get_str() + "/" + v.get_den().get_str();
    }
};

template <>
struct arith<double> {
    static constexpr bool exact = false;
    static constexpr const char* name = "float";

    // Absolute tolerance for comparisons; boundary inputs such as 1/sqrt(2)
    // are irrational, so exact comparison is meaningless in this mode.
    static double tol() { return 1e-9; }
    // Slack used only to stabilize tie-breaking inside maxima.
    static double tie_slack() { return 1e-12; }

    static bool is_finite(double v) { return std::isfinite(v); }

    static double ratio(long num, long den) {
        if (den == 0) throw ParseError("rational with zero denominator");
        return static_cast<double>(num) / static_cast<double>(den);
    }

    static double from_double(double v) { return v; }
    static double to_double(double v) { return v; }

    /// Accepts "a/b" (evaluated as a quotient) or any decimal literal.
    static double parse(const std::string& s) {
        if (s.empty()) throw ParseError("empty number");
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            double num = parse(s.substr(0, slash));
            double den = parse(s.substr(slash + 1));
            if (den == 0) throw ParseError("rational with zero denominator '" + s + "'");
            return num / den;
        }
        double v = 0;
        const char* first = s.data();
        const char* last = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last)
            throw ParseError("bad number literal '" + s + "'");
        return v;
    }

    /// Shortest representation that parses back to the same double.
    static std::string str(double v) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, ptr);
    }
};

/// a <= b within the mode tolerance.
template <typename R>
bool leq(const R& a, const R& b) {
    return a <= b + arith<R>::tol();
}

/// a >= b within the mode tolerance.
template <typename R>
bool geq(const R& a, const R& b) {
    return b <= a + arith<R>::tol();
}

/// |a - b| within the mode tolerance (exact equality in rational mode).
template <typename R>
bool approx_eq(const R& a, const R& b) {
    R d = a - b;
    if (d < R(0)) d = -d;
    return d <= arith<R>::tol();
}

} // namespace coinflip
