#pragma once

#include <stdexcept>
#include <string>

namespace dilset {

// Base class for everything this library throws on invalid input.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller violated a documented precondition (bad parameter range etc).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A requested depth exceeds the stored resolution or the depth budget.
class DepthError : public Error {
public:
    using Error::Error;
};

// Guard on expensive brute-force paths.
class SizeGuardError : public Error {
public:
    using Error::Error;
};

// Input polygon/parameters cannot be realized (sandwich violated etc).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    enum class Kind {
        BadHeader,
        BadDepth,
        BadRunCount,
        BadRuns,       // unsorted, overlapping or adjacent runs
        OutOfRange,    // index outside the [1,2] grid
        TrailingData,
        BadJson,
    };

    ParseError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

}  // namespace dilset
