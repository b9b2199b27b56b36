#ifndef SPECKLE_ERRORS_HPP
#define SPECKLE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace speckle
{

/// A caller supplied a value outside the documented domain.
class InvalidArgument : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Two arrays that must agree in shape or count do not.
class ShapeError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A file or byte buffer does not follow its container grammar.
class FormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// The reconstruction is too flat to define the normalized loss.
class DegenerateLoss : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A non-finite value appeared during optimization.
class NumericError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InternalError : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

} // namespace speckle

#endif // SPECKLE_ERRORS_HPP
