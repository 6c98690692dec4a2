#pragma once

#include <stdexcept>
#include <string>

namespace twoel {

// Every failure raised by the library derives from Error. The CLI maps the
// subclasses onto exit codes (see src/cli.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UniverseError : public Error { using Error::Error; };
class EvaluationError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class TransformError : public Error { using Error::Error; };
class UnsupportedError : public Error { using Error::Error; };
class StructureError : public Error { using Error::Error; };
class PreconditionError : public Error { using Error::Error; };
class DerivationMismatch : public Error { using Error::Error; };

// Numerical failures.
class NoRootError : public Error { using Error::Error; };
class IterationError : public Error { using Error::Error; };
class InconclusiveError : public Error { using Error::Error; };
class ConsistencyError : public Error { using Error::Error; };

}  // namespace twoel
