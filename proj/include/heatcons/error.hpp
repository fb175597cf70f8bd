#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace heatcons {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax or identifier error in a radial expression.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset, std::vector<std::string> expected = {});

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// Evaluation outside the domain of a sub-expression (log of a nonpositive
/// value, division by zero, ...).
class DomainError : public Error {
public:
    DomainError(const std::string& message, double r, std::string subtree);

    double radius() const noexcept { return r_; }
    const std::string& subtree() const noexcept { return subtree_; }

private:
    double r_;
    std::string subtree_;
};

/// Adaptive quadrature hit its subdivision limit.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& message, double a, double b);

    double lower() const noexcept { return a_; }
    double upper() const noexcept { return b_; }

private:
    double a_;
    double b_;
};

/// Invalid input data (manifold spec, configuration, numeric parameters).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed in a way that signals insufficient
/// resolution or a broken invariant.
class NumericsError : public Error {
public:
    using Error::Error;
};

}  // namespace heatcons
