#pragma once

#include <stdexcept>
#include <string>

namespace malcevlab {

/// Malformed input: files that do not parse, tables with out-of-range
/// entries, arguments that name nonexistent elements or operations.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold (for example a
/// decider that requires an idempotent algebra was given one with a nullary
/// operation).  Distinct from input_error only in that the input itself was
/// well-formed.
struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A resource cap was reached before the computation finished.  Callers that
/// can degrade gracefully catch this and report the question as inconclusive;
/// the answer is never coerced into a boolean.
struct cap_exceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two independently computed routes to the same answer disagreed, or an
/// internal consistency check failed.  This is always a bug (or a fault
/// injected deliberately by a test); it is never a property of the input.
struct verification_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace malcevlab
