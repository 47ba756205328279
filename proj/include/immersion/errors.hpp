#pragma once

#include <stdexcept>
#include <string>

namespace immersion {

/// Malformed arguments: unknown ids, out-of-range vertices, mismatched graphs.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A split would create a loop while loops are disallowed.
struct LoopError : InputError {
    explicit LoopError(const std::string& what) : InputError(what) {}
};

/// A documented precondition of an operation does not hold.
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// No connecting path exists (legitimate when expansion hypotheses fail).
struct NoPathError : std::runtime_error {
    explicit NoPathError(const std::string& what) : std::runtime_error(what) {}
};

/// A lemma's hypotheses did not hold at the attempted scale. Not a bug:
/// the construction reports how far it got and at which stage it gave up.
struct HypothesisNotMet : std::runtime_error {
    HypothesisNotMet(std::string stage_, const std::string& what)
        : std::runtime_error(what), stage(std::move(stage_)) {}
    std::string stage;
};

/// An invariant the theory guarantees was violated; always a bug.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

} // namespace immersion
