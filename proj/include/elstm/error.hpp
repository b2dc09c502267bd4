#pragma once

#include <stdexcept>
#include <string>

namespace elstm {

// Root of every error the library throws. Subclasses mark the failure family
// so the CLI can map them to stage-specific exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IngestError : public Error {
public:
    using Error::Error;
};

class DataQualityError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

// A finite-difference oracle was handed a loss that is not a pure function.
class OracleViolation : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace elstm
