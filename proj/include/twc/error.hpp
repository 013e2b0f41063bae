#ifndef TWC_ERROR_HPP
#define TWC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace twc {

/// Shape or dimension mismatch between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical precondition of an operation does not hold
/// (non-unitary input, xi >= 1, invalid norm spec, ...).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical routine failed to converge or produced a result that does not
/// pass its own residual check.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or unreadable/unwritable path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace twc

#endif
