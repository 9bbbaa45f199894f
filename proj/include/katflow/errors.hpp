#pragma once
#include <stdexcept>
#include <string>

namespace katflow {

enum class ErrorKind {
    ZeroVector,
    NotRealDisk,
    DegenerateTriple,
    SameBoundary,
    NotLorentz,
    NotTriangulation,
    BadOrientation,
    NotThreeConnected,
    Tetrahedron,
    KatViolation,
    NotStrictlyShallow,
    AntipodalEdge,
    SingularAtPin,
    TooSmall,
    IllConditioned,
    MonitorViolation,
    MaxSteps,
    NoValidPin,
    NonConvergent,
    NormalizationFailed,
    InvalidArgument,
    ParseError,
    IoError,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string detail)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + detail),
          kind_(kind), detail_(std::move(detail)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string detail) {
    throw Error(kind, std::move(detail));
}

} // namespace katflow
