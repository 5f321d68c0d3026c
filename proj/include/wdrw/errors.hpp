#pragma once

#include <stdexcept>
#include <string>

namespace wdrw {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define WDRW_ERROR(name)                         \
  struct name : Error {                          \
    using Error::Error;                          \
    name() : Error(#name) {}                     \
  }

WDRW_ERROR(ContextMismatch);
WDRW_ERROR(NonIntegralGhost);
WDRW_ERROR(LengthUnderflow);
WDRW_ERROR(CoefficientOutOfRange);
WDRW_ERROR(IndexOutsideSupport);
WDRW_ERROR(PreconditionViolated);
WDRW_ERROR(NonIntegralExtraction);
WDRW_ERROR(SingularSystem);
WDRW_ERROR(NonIntegralResult);
WDRW_ERROR(NotRelativelyPerfect);
WDRW_ERROR(MalformedTable);
WDRW_ERROR(WeightBoundExceeded);
WDRW_ERROR(UnknownInequality);
WDRW_ERROR(SyntaxError);
WDRW_ERROR(DegreeMismatch);

#undef WDRW_ERROR

}  // namespace wdrw
