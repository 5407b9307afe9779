#pragma once

#include <stdexcept>
#include <string>

namespace dtwist {

/// Raised when a parameter or config value violates a precondition.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A derivative was requested exactly at a point that only has one-sided
/// derivatives (the midpoint singularity of the gamma profiles).
class OneSidedOnly : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Adaptive quadrature did not reach the requested tolerance.
class CalibrationError : public std::runtime_error {
public:
    CalibrationError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_error(achieved) {}
    double achieved_error;
};

/// The construction broke down (e.g. the backward alpha sweep left the
/// domain of the inverse recurrence). `index` is the offending gap index.
class ConstructionError : public std::runtime_error {
public:
    ConstructionError(const std::string& what, long index)
        : std::runtime_error(what), index(index) {}
    long index;
};

/// Internal consistency failure; indicates a bug, not bad input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace dtwist
