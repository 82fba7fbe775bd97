// errors.hpp — exception types shared across the toolkit.
#pragma once

#include <stdexcept>
#include <string>

namespace tadpole {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Geometry / grid construction
struct InvalidGeometry : Error { using Error::Error; };
struct NonCommensurateTail : Error { using Error::Error; };

// Argument domains for special functions and maps
struct DomainError : Error { using Error::Error; };
struct NoRoot : Error { using Error::Error; };
struct NoBracket : Error { using Error::Error; };
struct NoAmplitude : Error { using Error::Error; };
struct NoShift : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };

// Solvers
struct NewtonDiverged : Error { using Error::Error; };
struct SingularJacobian : Error { using Error::Error; };
struct QRNoConvergence : Error { using Error::Error; };
struct NonSymmetrizable : Error { using Error::Error; };
struct SectorMismatch : Error { using Error::Error; };
struct NotImaginary : Error { using Error::Error; };

} // namespace tadpole
