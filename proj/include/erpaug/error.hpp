#pragma once

#include <stdexcept>
#include <string>

namespace erpaug {

// Root of all library errors. The CLI maps DataError to exit code 2 and
// NumericError to exit code 3; anything else deriving from Error is a usage
// or configuration problem (exit code 1).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data is malformed, missing or inconsistent.
class DataError : public Error {
 public:
  using Error::Error;
};

// A numerical routine cannot produce a meaningful result.
class NumericError : public Error {
 public:
  using Error::Error;
};

#define ERPAUG_DEFINE_ERROR(Name, Base) \
  class Name : public Base {            \
   public:                              \
    using Base::Base;                   \
  }

ERPAUG_DEFINE_ERROR(InvalidMontage, DataError);
ERPAUG_DEFINE_ERROR(InvalidSpec, ConfigError);
ERPAUG_DEFINE_ERROR(ShapeMismatch, DataError);
ERPAUG_DEFINE_ERROR(OutOfBounds, DataError);
ERPAUG_DEFINE_ERROR(SingleClass, DataError);
ERPAUG_DEFINE_ERROR(TooFewSamples, DataError);
ERPAUG_DEFINE_ERROR(LengthMismatch, DataError);
ERPAUG_DEFINE_ERROR(MissingFile, DataError);
ERPAUG_DEFINE_ERROR(SizeMismatch, DataError);
ERPAUG_DEFINE_ERROR(UnknownLabel, DataError);
ERPAUG_DEFINE_ERROR(FormatError, DataError);
ERPAUG_DEFINE_ERROR(IoError, DataError);
ERPAUG_DEFINE_ERROR(DomainError, NumericError);
ERPAUG_DEFINE_ERROR(NegativeRadius, NumericError);
ERPAUG_DEFINE_ERROR(SingularSystem, NumericError);
ERPAUG_DEFINE_ERROR(NonIntegerFactor, ConfigError);
ERPAUG_DEFINE_ERROR(BandOutOfRange, ConfigError);
ERPAUG_DEFINE_ERROR(WindowTooLarge, ConfigError);

#undef ERPAUG_DEFINE_ERROR

}  // namespace erpaug
