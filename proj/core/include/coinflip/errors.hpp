#pragma once

#include <stdexcept>

namespace coinflip {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A construction-time invariant does not hold (probability range, spec
/// inequalities). The message names the violated condition.
struct ConstraintViolation : Error {
    using Error::Error;
};

/// An operation was called outside its stated domain.
struct PreconditionViolation : Error {
    using Error::Error;
};

/// The requested coin flip lies outside the feasible region of the chosen
/// setting; nothing can be synthesized.
struct InfeasibleSpec : Error {
    using Error::Error;
};

/// A protocol tree failed well-formedness checks.
struct MalformedTree : Error {
    using Error::Error;
};

/// Text or JSON input could not be decoded.
struct ParseError : Error {
    using Error::Error;
};

/// The brute-force strategy enumeration would exceed its configured limit.
struct ExplosionGuard : Error {
    using Error::Error;
};

/// An adversary script lacks a decision for a reachable node it must cover.
struct ScriptMismatch : Error {
    using Error::Error;
};

} // namespace coinflip
