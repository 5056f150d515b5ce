#pragma once

#include <stdexcept>
#include <string>

namespace divbar {

/// Input/parameter problems. CLI maps these to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A solver ran but could not reach its tolerance. CLI exit code 3.
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested constraint cannot be met at all. CLI exit code 4.
class ConstraintFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateCost : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NonPositive : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class RiskOutOfRange : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class GridError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NoConvergence : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};

class InstabilityError : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};

class NoBracket : public ConstraintFailure {
public:
    using ConstraintFailure::ConstraintFailure;
};

class Unattainable : public ConstraintFailure {
public:
    using ConstraintFailure::ConstraintFailure;
};

}  // namespace divbar
