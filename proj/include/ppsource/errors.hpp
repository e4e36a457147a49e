#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ppsource {

// Every failure the library throws carries a short stable code alongside the
// message. The CLI maps these to single-line "error: <code>: <message>" output.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct RangeError : Error {
    explicit RangeError(const std::string& m) : Error("range", m) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error("domain", m) {}
};

struct ConsistencyError : Error {
    explicit ConsistencyError(const std::string& m) : Error("consistency", m) {}
};

struct NoSolutionError : Error {
    explicit NoSolutionError(const std::string& m) : Error("no_solution", m) {}
};

struct DegeneratePhaseMatchingError : Error {
    explicit DegeneratePhaseMatchingError(const std::string& m)
        : Error("degenerate_phasematching", m) {}
};

struct ModelViolationError : Error {
    explicit ModelViolationError(const std::string& m) : Error("model_violation", m) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error("numeric", m) {}
};

struct IoError : Error {
    explicit IoError(const std::string& m) : Error("io", m) {}
};

}  // namespace ppsource
