#pragma once

#include <stdexcept>
#include <string>

namespace fwlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A raw parameter fell outside its admissible window.
class ConstraintViolation : public Error {
public:
    ConstraintViolation(std::string name, double value, double bound, const std::string& detail);

    const std::string& name() const noexcept { return name_; }
    double value() const noexcept { return value_; }
    double bound() const noexcept { return bound_; }

private:
    std::string name_;
    double value_;
    double bound_;
};

class DegenerateExponent : public Error {
public:
    using Error::Error;
};

class UnknownName : public Error {
public:
    using Error::Error;
};

class NonIntegrableSingularity : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class ZeroDensityRegion : public Error {
public:
    using Error::Error;
};

/// Function is tagged for rearrangement use only (not weakly differentiable).
class RearrangementOnlyFunction : public Error {
public:
    using Error::Error;
};

class NonMonotoneProfile : public Error {
public:
    using Error::Error;
};

class DivergentQuasinorm : public Error {
public:
    using Error::Error;
};

class ExponentMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace fwlab
