#pragma once

#include <stdexcept>
#include <string>

namespace paramosc {

/// Invalid parameters, configuration, or arguments. CLI exit code 2.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: step-size underflow, non-finite coefficients,
/// conservation-law drift, or an evaluation outside its domain. CLI exit code 3.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace paramosc
