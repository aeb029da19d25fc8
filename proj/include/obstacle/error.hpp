#pragma once

#include <stdexcept>
#include <string>

namespace obstacle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments or inconsistent inputs supplied by the caller.
class InputError : public Error {
public:
    using Error::Error;
};

/// A tetrahedron with (near) zero volume.
class DegenerateElementError : public Error {
public:
    DegenerateElementError(int tet, const std::string& what)
        : Error(what), tet_(tet) {}
    [[nodiscard]] int tet() const noexcept { return tet_; }

private:
    int tet_;
};

/// A callable returned NaN or infinity while integrating over an element.
class NonFiniteDataError : public Error {
public:
    NonFiniteDataError(int tet, const std::string& what)
        : Error(what), tet_(tet) {}
    [[nodiscard]] int tet() const noexcept { return tet_; }

private:
    int tet_;
};

/// Failure of an inner linear solve or a structurally singular system.
class SolverError : public Error {
public:
    using Error::Error;
};

} // namespace obstacle
