#pragma once

#include <stdexcept>
#include <string>

namespace q3 {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A valuation or root could not be certified at the current precision.
struct PrecisionExhausted : Error {
    using Error::Error;
};

/// Root search went deeper than the supported ramification depth.
struct IrregularResidual : Error {
    using Error::Error;
};

struct HenselConditionFailed : Error {
    using Error::Error;
};

struct TransformFailed : Error {
    using Error::Error;
};

struct RadiusNotInImage : Error {
    using Error::Error;
};

struct InvalidUse : Error {
    using Error::Error;
};

/// Input errors; all map to exit code 4.
struct InputError : Error {
    using Error::Error;
};
struct ParseError : InputError {
    using InputError::InputError;
};
struct InvalidBase : InputError {
    using InputError::InputError;
};
struct PointNotOnCurve : InputError {
    using InputError::InputError;
};
struct SingularAtPoint : InputError {
    using InputError::InputError;
};
struct NotGenericallyEtale : InputError {
    using InputError::InputError;
};
/// F has a root in K(x), so the cover is not irreducible.
struct ReducibleCover : InputError {
    using InputError::InputError;
};

/// Unreadable input or unwritable output file; exit code 4.
struct IoError : Error {
    using Error::Error;
};

}  // namespace q3
