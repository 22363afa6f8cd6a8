#pragma once

#include <stdexcept>
#include <string>

namespace combind {

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidModel : public Error {
public:
    using Error::Error;
};

class UnsupportedSpec : public Error {
public:
    using Error::Error;
};

class EmptyLanguage : public Error {
public:
    using Error::Error;
};

class WordTooLong : public Error {
public:
    using Error::Error;
};

class DepthCapExceeded : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class NonDisjointNeighbourhoods : public Error {
public:
    using Error::Error;
};

class PremiseFailed : public Error {
public:
    PremiseFailed(const std::string& what, double actual_rate)
        : Error(what), actual_rate_(actual_rate) {}
    /// H(P^F)/n measured when the premise check failed.
    double actual_rate() const noexcept { return actual_rate_; }

private:
    double actual_rate_;
};

class CertificateInvalid : public Error {
public:
    using Error::Error;
};

class Degenerate : public Error {
public:
    using Error::Error;
};

/// Malformed or schema-violating run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace combind
