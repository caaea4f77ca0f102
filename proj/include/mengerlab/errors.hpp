#pragma once

#include <stdexcept>
#include <string>

namespace mengerlab {

// Typed failures surfaced to callers (and mapped to exit codes by the CLI).
// Everything that is a *state* rather than a failure (degenerate simplices,
// empty reports, hypothesis not met) is returned as a value, not thrown.

struct DegenerateInput : std::runtime_error {
    explicit DegenerateInput(const std::string& what) : std::runtime_error(what) {}
};

struct DimMismatch : std::runtime_error {
    explicit DimMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct TooSteep : std::runtime_error {
    explicit TooSteep(const std::string& what) : std::runtime_error(what) {}
};

struct IndexOutOfRange : std::runtime_error {
    explicit IndexOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateFace : std::runtime_error {
    explicit DegenerateFace(const std::string& what) : std::runtime_error(what) {}
};

struct TooFewPoints : std::runtime_error {
    explicit TooFewPoints(const std::string& what) : std::runtime_error(what) {}
};

struct TooLargeN : std::runtime_error {
    explicit TooLargeN(const std::string& what) : std::runtime_error(what) {}
};

struct TooLarge : std::runtime_error {
    explicit TooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyBall : std::runtime_error {
    explicit EmptyBall(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyMeasure : std::runtime_error {
    explicit EmptyMeasure(const std::string& what) : std::runtime_error(what) {}
};

struct NoGoodBall : std::runtime_error {
    explicit NoGoodBall(const std::string& what) : std::runtime_error(what) {}
};

struct ProjectionNotInjective : std::runtime_error {
    explicit ProjectionNotInjective(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfDomain : std::runtime_error {
    explicit OutOfDomain(const std::string& what) : std::runtime_error(what) {}
};

struct BadParams : std::runtime_error {
    explicit BadParams(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mengerlab
