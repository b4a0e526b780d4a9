#pragma once

#include <stdexcept>

namespace nfd {

// Every throw site in the library uses one of these, so the CLI can map any
// failure to a one-line diagnostic and a nonzero exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad configuration values: schedule bounds, step counts, unknown config keys
struct ConfigError : Error { using Error::Error; };

// vector/matrix dimension mismatches
struct ShapeError : Error { using Error::Error; };

// timestep outside [1, T], or a reverse step that does not decrease t
struct StepRangeError : Error { using Error::Error; };

// empty or undersized inputs (datasets, score lists, context sets, folds)
struct InputError : Error { using Error::Error; };

// per-step noise present when it must be absent, or absent when required
struct NoiseStreamError : Error { using Error::Error; };

// non-finite training loss
struct TrainingDivergenceError : Error { using Error::Error; };

// zero-norm vector where a direction is required
struct NormalizationError : Error { using Error::Error; };

// unreadable, corrupt, or non-finite model checkpoints
struct CheckpointError : Error { using Error::Error; };

// filesystem and format failures outside checkpoints
struct IoError : Error { using Error::Error; };

}  // namespace nfd
