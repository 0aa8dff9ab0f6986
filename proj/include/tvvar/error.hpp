#pragma once

#include <stdexcept>
#include <string>

namespace tvvar {

/// Raised when a numerical step cannot proceed: a singular system, a matrix
/// that should be positive definite but is not, degenerate kernel weights,
/// or a series that fails to converge.
class NumericalError : public std::runtime_error
{
public:
  explicit NumericalError(const std::string& what)
    : std::runtime_error(what)
  {
  }
};

} // namespace tvvar
