#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace she {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad arguments to a library call (negative diffusion, odd p, t <= 0 ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Unusable run configuration (unstable scheme, unknown measure, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Base for every "the quantity is infinite" outcome; the CLI maps it to exit 3.
class Divergence : public Error {
public:
    using Error::Error;
};

class DivergentJ0 : public Divergence {
public:
    using Divergence::Divergence;
};

class DivergentMoment : public Divergence {
public:
    using Divergence::Divergence;
};

class NumericalBlowup : public Divergence {
public:
    NumericalBlowup(const std::string& what, std::uint64_t replicate)
        : Divergence(what + " (replicate " + std::to_string(replicate) + ")"), replicate_(replicate) {}
    std::uint64_t replicate() const noexcept { return replicate_; }

private:
    std::uint64_t replicate_;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class NoSignChange : public Error {
public:
    using Error::Error;
};

class WindowTooNarrow : public Error {
public:
    using Error::Error;
};

class InsufficientReplicates : public Error {
public:
    using Error::Error;
};

}  // namespace she
