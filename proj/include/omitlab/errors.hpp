#pragma once

#include <stdexcept>
#include <string>

namespace omitlab {

// Base of every failure raised by the library. Sweeps catch this type and
// record the message per cell.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class NoPhysicalRoot : public Error {
public:
    using Error::Error;
};

class SingularDenominator : public Error {
public:
    using Error::Error;
};

class DetunedModes : public Error {
public:
    using Error::Error;
};

class NoInteriorMinimum : public Error {
public:
    using Error::Error;
};

class NonConverged : public Error {
public:
    using Error::Error;
};

class StepTooLarge : public Error {
public:
    using Error::Error;
};

class Diverged : public Error {
public:
    using Error::Error;
};

class WindowTooShort : public Error {
public:
    using Error::Error;
};

class InvalidSpec : public Error {
public:
    using Error::Error;
};

} // namespace omitlab
