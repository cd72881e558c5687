#pragma once

#include <stdexcept>
#include <string>

namespace cascnn {

/// Base class for all library errors. The CLI maps subclasses to exit codes:
/// ConfigError -> 1, data/format family -> 2, NumericError -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: shape mismatches, bad layer specs, bad parameters.
struct ConfigError : Error {
    using Error::Error;
};

/// Invalid data: labels outside {0,1}, out-of-range scores, malformed ids.
struct DataError : Error {
    using Error::Error;
};

/// Malformed file: bad magic, version, truncation, sidecar mismatch.
struct FormatError : Error {
    using Error::Error;
};

/// Subsampling request cannot be satisfied (n larger than the class).
struct SamplingError : Error {
    using Error::Error;
};

/// k-fold split infeasible (a class smaller than k).
struct SplitError : Error {
    using Error::Error;
};

/// Training cannot proceed (empty or single-class training set).
struct TrainingError : Error {
    using Error::Error;
};

/// A cascade stage cannot be trained from the surviving pool.
struct DegenerateStageError : TrainingError {
    using TrainingError::TrainingError;
};

/// Evaluation inputs are unusable (empty score list, length mismatch, no positives).
struct EvalError : Error {
    using Error::Error;
};

/// A candidate cannot be routed to a fold (unknown lesion id).
struct RoutingError : Error {
    using Error::Error;
};

/// Non-finite values where finite ones are required (gradients, losses).
struct NumericError : Error {
    using Error::Error;
};

/// Filesystem failure (unreadable/unwritable path).
struct IoError : Error {
    using Error::Error;
};

}  // namespace cascnn
