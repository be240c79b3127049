#pragma once

#include <stdexcept>
#include <string>

namespace scx {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SCX_DECLARE_ERROR(Name)              \
    class Name : public Error {              \
    public:                                  \
        using Error::Error;                  \
    }

/// Malformed arguments: dimension mismatch, nonpositive spacing, ...
SCX_DECLARE_ERROR(InputError);
/// A theorem hypothesis (segment containment) fails for the given data.
SCX_DECLARE_ERROR(HypothesisError);
/// A finite-difference stencil leaves the domain.
SCX_DECLARE_ERROR(StencilError);
/// Evaluation outside the function's support (e.g. outside a sampled grid hull).
SCX_DECLARE_ERROR(EvaluationError);
/// Random sampling could not produce a valid sample within the retry cap.
SCX_DECLARE_ERROR(SamplingError);
/// No interior sample point could be found near the base point.
SCX_DECLARE_ERROR(IsolationError);
/// Empty or otherwise unusable region.
SCX_DECLARE_ERROR(GeometryError);
/// Partition-of-unity weights fail to sum to one.
SCX_DECLARE_ERROR(PartitionError);
/// Numeric parameter outside its admissible range.
SCX_DECLARE_ERROR(ParameterError);
/// The normal cone at the requested point is {0}.
SCX_DECLARE_ERROR(DegenerateDirectionError);
/// Configuration file could not be parsed or validated.
SCX_DECLARE_ERROR(ConfigError);

#undef SCX_DECLARE_ERROR

}  // namespace scx
