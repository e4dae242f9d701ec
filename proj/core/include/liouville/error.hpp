#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace liouville {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structure parameters violate n >= 2, p > 1 or eps > 0.
class InvalidParams : public Error {
public:
    using Error::Error;
};

/// n <= p: every non-negative solution of -div A(x, grad u) >= 0 is a
/// constant, so neither the criterion nor the construction applies.
class UnsupportedRegime : public Error {
public:
    explicit UnsupportedRegime(const std::string& what);
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset);

    std::size_t offset() const noexcept { return offset_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    std::size_t offset_;
};

/// Evaluation left the real domain: negative base under a non-integer power,
/// log of a non-positive number, division by zero, or a negative f value.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A finite input produced a non-finite result.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// The integrand returned NaN or infinity inside the integration interval.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double where);

    double where() const noexcept { return where_; }

private:
    double where_;
};

/// The criterion integral (or a quantity that is finite exactly when it is)
/// did not converge.
class DivergentCriterion : public Error {
public:
    using Error::Error;
};

/// f failed the sampled monotonicity check on (0, eps].
class MonotonicityError : public Error {
public:
    MonotonicityError(const std::string& what, double lo, double hi);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// The delta search ran through its halving cap without a certified delta.
class SearchExhausted : public Error {
public:
    using Error::Error;
};

} // namespace liouville
