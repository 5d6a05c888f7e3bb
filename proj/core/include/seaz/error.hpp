#pragma once

#include <stdexcept>
#include <string>

namespace seaz {

// Bad argument to a library call (wrong degree, mismatched lengths, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A configuration that violates a parameter invariant or cannot be analysed.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A passivity condition that fails already at the zero-impedance baseline.
class UnsafeBaseline : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Division by an identically-zero quantity or evaluation on a pole.
class SingularError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical procedure that did not reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace seaz
