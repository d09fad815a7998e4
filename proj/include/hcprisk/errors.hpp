#pragma once

#include <stdexcept>
#include <string>

namespace hcprisk {

// Error categories double as CLI exit codes: parse -> 2, domain/config -> 3,
// model -> 4 (runtime failures of an otherwise well-formed computation).
enum class ErrorCategory : int {
    parse = 2,
    domain = 3,
    model = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string message)
        : std::runtime_error(std::move(message)), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

// Malformed input files or records (bad CSV row, invalid JSON, schema
// violations in a network file).
class ParseError : public Error {
public:
    explicit ParseError(std::string message)
        : Error(ErrorCategory::parse, std::move(message)) {}
};

// Arguments outside their mathematical domain (probability outside [0,1],
// negative hazard rate, enumeration budget exceeded, ...).
class DomainError : public Error {
public:
    explicit DomainError(std::string message)
        : Error(ErrorCategory::domain, std::move(message)) {}
};

// Structurally valid inputs that cannot be wired together (missing model for
// covariate-only events, schema mismatches, missing case-study variables).
class ConfigError : public Error {
public:
    explicit ConfigError(std::string message)
        : Error(ErrorCategory::domain, std::move(message)) {}
};

// Failures arising while running a well-posed model (non-convergence,
// complete separation, impossible evidence).
class ModelError : public Error {
public:
    explicit ModelError(std::string message)
        : Error(ErrorCategory::model, std::move(message)) {}
};

class ImpossibleEvidenceError : public ModelError {
public:
    using ModelError::ModelError;
};

class SeparationError : public ModelError {
public:
    using ModelError::ModelError;
};

}  // namespace hcprisk
