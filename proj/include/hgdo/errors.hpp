#pragma once

#include <stdexcept>
#include <string>

namespace hgdo {

// Base class for every error raised by the library. Callers that only care
// about "something went wrong with this run" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GimbalLock : public Error {
public:
    explicit GimbalLock(double theta)
        : Error("gimbal lock: |cos(theta)| below guard at theta = " + std::to_string(theta)) {}
};

class NonPositiveEpsilon : public Error {
public:
    explicit NonPositiveEpsilon(double eps)
        : Error("observer epsilon must be > 0, got " + std::to_string(eps)) {}
};

class ThrustSingularity : public Error {
public:
    explicit ThrustSingularity(double uz)
        : Error("vertical virtual input below guard: u_z = " + std::to_string(uz)) {}
};

class NonDifferentiable : public Error {
public:
    using Error::Error;
};

class NonFinite : public Error {
public:
    using Error::Error;
};

class EmptyTrace : public Error {
public:
    EmptyTrace() : Error("trace (or selected window) is empty") {}
};

class StochasticDisturbance : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& what) : Error(path + ": " + what) {}
};

}  // namespace hgdo
