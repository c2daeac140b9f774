#pragma once

#include <stdexcept>
#include <string>

namespace leggett {

/// A parameter lies outside the domain of an operation (N < 2, phi outside [0, pi], ...).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Measured or provided data is unusable (correlation outside [-1, 1], zero counts, ...).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A document (JSON config, layout, count CSV) does not match its expected shape.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace leggett
