#pragma once

#include <stdexcept>
#include <string>

namespace geocover {

/// Raised when a caller breaks a documented precondition (kind mismatch,
/// out-of-bound coordinates, malformed parameters).
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Raised for recoverable lookup failures: unknown ids, stale node handles.
class LookupError : public std::runtime_error {
public:
    explicit LookupError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input files or flags, with a location when one is known.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Internal inconsistency detected at run time (oracle disagreement,
/// exhausted retries). Callers surface these as anomalies.
class Anomaly : public std::runtime_error {
public:
    explicit Anomaly(const std::string& what) : std::runtime_error(what) {}
};

#define GEOCOVER_REQUIRE(cond, msg)                                                    \
    do {                                                                               \
        if (!(cond)) throw ::geocover::ContractViolation(std::string(msg));            \
    } while (0)

#define GEOCOVER_CHECK(cond, msg)                                                      \
    do {                                                                               \
        if (!(cond)) throw ::geocover::Anomaly(std::string(msg));                      \
    } while (0)

}  // namespace geocover
