#pragma once

#include <stdexcept>
#include <string>

namespace quiverhk {

// Base of everything thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input: wrong shapes, non-unit rotations,
// non-nilpotent matrices, unparsable files.  The CLI maps these to exit 2.
class InputError : public Error {
public:
    using Error::Error;
};

class ShapeError : public InputError {
public:
    using InputError::InputError;
};

class NotNilpotent : public InputError {
public:
    using InputError::InputError;
};

class PreconditionViolated : public InputError {
public:
    using InputError::InputError;
};

// A numerical procedure could not meet its contract.  Exit 1 in the CLI.
class SolverError : public Error {
public:
    using Error::Error;
};

class ToleranceFailure : public SolverError {
public:
    using SolverError::SolverError;
};

class ComplexDrift : public SolverError {
public:
    using SolverError::SolverError;
};

class InterpolationError : public SolverError {
public:
    using SolverError::SolverError;
};

class NewtonStagnation : public SolverError {
public:
    using SolverError::SolverError;
};

class LeakageError : public SolverError {
public:
    using SolverError::SolverError;
};

class Unattainable : public SolverError {
public:
    using SolverError::SolverError;
};

class ZeroComponent : public SolverError {
public:
    ZeroComponent(int j, const std::string& what) : SolverError(what), component(j) {}
    int component;
};

}  // namespace quiverhk
