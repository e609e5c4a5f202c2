#pragma once

#include <stdexcept>
#include <string>

namespace qha {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define QHA_DEFINE_ERROR(Name)                                                 \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string &what) : Error(#Name ": " + what) {}       \
  }

QHA_DEFINE_ERROR(ShapeTooLarge);
QHA_DEFINE_ERROR(DimensionMismatch);
QHA_DEFINE_ERROR(NotHermitian);
QHA_DEFINE_ERROR(ZeroVector);
QHA_DEFINE_ERROR(BadWeights);
QHA_DEFINE_ERROR(BadSmoother);
QHA_DEFINE_ERROR(BadDelta);
QHA_DEFINE_ERROR(BadArgument);
QHA_DEFINE_ERROR(ConsistencyFailure);
QHA_DEFINE_ERROR(EmptyDomain);
QHA_DEFINE_ERROR(MismatchedState);
QHA_DEFINE_ERROR(NotABall);
QHA_DEFINE_ERROR(NotADensity);
QHA_DEFINE_ERROR(ParseError);

#undef QHA_DEFINE_ERROR

} // namespace qha
