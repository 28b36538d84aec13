#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace radsym {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte position of the failure.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Identifier that is neither reserved nor declared in the symbol table.
class UnknownSymbolError : public Error {
public:
    UnknownSymbolError(const std::string& token, std::size_t offset)
        : Error("unknown symbol '" + token + "' at offset " + std::to_string(offset)),
          token_(token), offset_(offset) {}
    const std::string& token() const noexcept { return token_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string token_;
    std::size_t offset_;
};

/// Function symbol used without a derivative rule or evaluator.
class UnregisteredSymbolError : public Error {
public:
    explicit UnregisteredSymbolError(const std::string& symbol)
        : Error("function symbol '" + symbol + "' is not registered"), symbol_(symbol) {}
    const std::string& symbol() const noexcept { return symbol_; }

private:
    std::string symbol_;
};

/// Variable without a numeric binding during evaluation.
class UnboundVariableError : public Error {
public:
    explicit UnboundVariableError(const std::string& name)
        : Error("unbound variable '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Argument outside the real domain of an operation (ln of non-positive, etc).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Division by an identically vanishing quantity, e.g. F for constant ratio.
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Invalid coefficient model parameters or empty physical domain.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Iterative method failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Closed-form group action evaluated outside its validity window.
class ValidityError : public Error {
public:
    using Error::Error;
};

/// Numerical flow left the admissible (z, t, u) region.
class DomainExitError : public Error {
public:
    DomainExitError(const std::string& message, double lambda)
        : Error(message + " at lambda=" + std::to_string(lambda)), lambda_(lambda) {}
    double lambda() const noexcept { return lambda_; }

private:
    double lambda_;
};

/// Lie bracket that is not a combination of the supplied basis.
class BracketClosureError : public Error {
public:
    BracketClosureError(const std::string& message, std::string residual)
        : Error(message + ": residual " + residual), residual_(std::move(residual)) {}
    const std::string& residual() const noexcept { return residual_; }

private:
    std::string residual_;
};

/// Catalog lookup for an unknown id or an inapplicable model.
class CatalogError : public Error {
public:
    using Error::Error;
};

}  // namespace radsym
