// Error taxonomy shared by every stage of the pipeline.
#pragma once

#include <stdexcept>
#include <string>

namespace glucast {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or physically impossible input value or parameter.
class InvalidValueError : public Error {
public:
    using Error::Error;
};

/// Malformed source data (CSV cell, XML element, JSON entity).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structural mismatch: missing required column, unknown config field.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Network failure that persisted through the retry budget.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Rejected credentials (HTTP 401).
class AuthError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure; message names the path.
class IoError : public Error {
public:
    using Error::Error;
};

/// An operation received zero usable records or pairs.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// Not enough rows to honour the requested lookback/horizon/split.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Serialized artifact carries an unsupported format_version.
class FormatVersionError : public Error {
public:
    using Error::Error;
};

/// Serialized artifact is structurally damaged (truncation, bad payload).
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// Model artifact was trained under a different configuration.
class StaleModelError : public Error {
public:
    using Error::Error;
};

/// Matrix row width does not match the trained feature layout.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Prediction rows do not line up with the frame grid.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// Bad command-line invocation.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace glucast
