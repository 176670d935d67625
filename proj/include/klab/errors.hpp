#ifndef KLAB_ERRORS_HPP
#define KLAB_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace klab {

enum class ErrorKind {
  InvalidInput,
  DegeneratePair,
  DegeneratePencil,
  ConvergenceFailure,
  UnsupportedDimension,
  PreconditionViolation,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::DegeneratePair: return "DegeneratePair";
    case ErrorKind::DegeneratePencil: return "DegeneratePencil";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by line tests when the two points span no plane.
/// Carries the vertex indices when raised during graph construction.
class DegeneratePairError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit DegeneratePairError(const std::string& what, std::size_t i = npos,
                               std::size_t j = npos)
      : Error(ErrorKind::DegeneratePair, what), i_(i), j_(j) {}

  std::size_t first() const noexcept { return i_; }
  std::size_t second() const noexcept { return j_; }

 private:
  std::size_t i_;
  std::size_t j_;
};

}  // namespace klab

#endif  // KLAB_ERRORS_HPP
