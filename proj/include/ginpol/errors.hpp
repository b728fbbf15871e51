#pragma once
// Typed error hierarchy. Exit-code mapping lives in the CLI: usage errors
// are caught by the arg parser (2), EscalationError maps to 3, everything
// else derived from Error maps to 1.

#include <stdexcept>
#include <string>

namespace ginpol {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// invalid mathematical input (pole of Gamma, point on a branch cut, ...)
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("domain error: " + msg) {}
};

// an iterative scheme stopped before reaching its target accuracy
struct AccuracyError : Error {
    double achieved;
    AccuracyError(const std::string& msg, double achieved_residual)
        : Error("accuracy error: " + msg + " (achieved " + std::to_string(achieved_residual) + ")"),
          achieved(achieved_residual) {}
};

// an elimination pivot fell below the working tolerance
struct SingularityError : Error {
    int pivot_index;
    double pivot_magnitude;
    SingularityError(const std::string& msg, int index, double mag)
        : Error("singular system: " + msg + " (pivot " + std::to_string(index) + ", |p|=" +
                std::to_string(mag) + ")"),
          pivot_index(index),
          pivot_magnitude(mag) {}
};

// two independent evaluation routes disagree beyond tolerance
struct ConsistencyError : Error {
    double discrepancy;
    ConsistencyError(const std::string& msg, double disc)
        : Error("route disagreement: " + msg + " (|diff|=" + std::to_string(disc) + ")"),
          discrepancy(disc) {}
};

// a composite expression picked up a non-finite intermediate
struct AssemblyError : Error {
    explicit AssemblyError(const std::string& msg)
        : Error("assembly error: " + msg) {}
};

// the highest available precision was still insufficient
struct EscalationError : Error {
    explicit EscalationError(const std::string& msg)
        : Error("escalation exhausted: " + msg) {}
};

// a quantity left the range where it may be materialized as a plain value
struct RangeError : Error {
    explicit RangeError(const std::string& msg) : Error("range error: " + msg) {}
};

}  // namespace ginpol
