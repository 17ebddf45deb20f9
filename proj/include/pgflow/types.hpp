// Basic scalar types, error hierarchy and numeric constants shared by all modules.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace pgflow {

using Complex = std::complex<double>;

constexpr double kEpsCoincide = 1e-9;   // relative, structural coincidence tests
constexpr double kEpsCircle = 1e-8;     // |.|-1 margin for zeros on the unit circle
constexpr double kEpsBoundaryEvent = 1e-8;
constexpr double kEpsU = 1e-12;         // saturated-set threshold on the potential
constexpr int kDefaultContourNodes = 1024;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : Error { using Error::Error; };
struct PoleEvaluationError : Error { using Error::Error; };
struct PathSingularityError : Error { using Error::Error; };
struct DegenerateStructureError : Error { using Error::Error; };
struct BoundaryZeroError : Error { using Error::Error; };
struct UnsupportedStructureError : Error { using Error::Error; };
struct UnsupportedTransitionError : Error { using Error::Error; };
struct StepRejectedError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct SubordinationError : Error { using Error::Error; };
struct GridTooSmallError : Error { using Error::Error; };
struct IterationLimitError : Error { using Error::Error; };
struct OutOfRangeError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// Reflection in the unit circle, z -> 1/conj(z).
inline Complex reflect(Complex z) {
  if (z == Complex(0.0, 0.0))
    throw DomainError("reflect: origin has no finite reflection");
  return 1.0 / std::conj(z);
}

}  // namespace pgflow
