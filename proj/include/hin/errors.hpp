#pragma once

#include <stdexcept>
#include <string>

namespace hin {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor shape / dimension violations.
struct ShapeError : Error {
    using Error::Error;
};

// Invalid configuration values (hyperparameters, split specs, modes).
struct ConfigError : Error {
    using Error::Error;
};

// Class labels outside [1..K].
struct LabelError : Error {
    using Error::Error;
};

// API misuse (backward on non-scalar, item() on non-scalar, ...).
struct UsageError : Error {
    using Error::Error;
};

// Encoder preconditions (empty candidate span, empty input).
struct EncodeError : Error {
    using Error::Error;
};

// Corpus parsing and per-sample preprocessing failures.
struct IngestError : Error {
    using Error::Error;
};

// Metric computation on empty inputs.
struct EvalError : Error {
    using Error::Error;
};

// Training aborts (divergence, empty splits detected mid-run).
struct TrainError : Error {
    using Error::Error;
};

// Checkpoint file corruption or model/file mismatch.
struct CheckpointError : Error {
    using Error::Error;
};

}  // namespace hin
