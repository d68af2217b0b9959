#pragma once

#include <stdexcept>
#include <string>

namespace flatreg {

// Bad input or configuration; the CLI maps this to exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Any failure while computing.
class RuntimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unfolding exceeded its node budget.
class ResourceError : public RuntimeError {
public:
    using RuntimeError::RuntimeError;
};

// A logarithm was requested outside the arc its branch is continuous on.
class BranchError : public RuntimeError {
public:
    using RuntimeError::RuntimeError;
};

} // namespace flatreg
