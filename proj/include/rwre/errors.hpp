#ifndef RWRE_ERRORS_HPP
#define RWRE_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rwre {

// Base class for all failures raised by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// lo > hi or a window that cannot hold the requested sites.
class InvalidWindowError : public Error {
  public:
    using Error::Error;
};

// A triple with p_left = 0 where a transfer matrix is required.
class DegenerateEnvironmentError : public Error {
  public:
    using Error::Error;
};

// A walk stepped outside the realized environment window.
class WindowError : public Error {
  public:
    using Error::Error;
};

// Step budget exhausted before the stopping condition.
class TruncationError : public Error {
  public:
    TruncationError(const std::string& msg, std::int64_t steps_used)
        : Error(msg), steps_used(steps_used) {}
    std::int64_t steps_used = 0;
};

// Operation requires a different walk regime than the model exhibits.
class RegimeError : public Error {
  public:
    using Error::Error;
};

class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

class InvariantViolationError : public Error {
  public:
    using Error::Error;
};

// "Cannot happen" guards (overflow despite scaling, singular pivot, ...).
class InternalError : public Error {
  public:
    using Error::Error;
};

// Config file parse/validation failure; message carries line/field info.
class ConfigError : public Error {
  public:
    using Error::Error;
};

// A replica worker threw; carries the replica index and derived seed for replay.
class WorkerError : public Error {
  public:
    WorkerError(const std::string& msg, std::uint64_t replica, std::uint64_t seed)
        : Error(msg), replica(replica), seed(seed) {}
    std::uint64_t replica = 0;
    std::uint64_t seed = 0;
};

}  // namespace rwre

#endif
