#pragma once

#include <stdexcept>
#include <string>

namespace ppkg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define PPKG_ERROR_TYPE(Name)               \
  struct Name : Error {                     \
    using Error::Error;                     \
  }

PPKG_ERROR_TYPE(OutOfRangeError);
PPKG_ERROR_TYPE(InvalidPartyCountError);
PPKG_ERROR_TYPE(MissingShareError);
PPKG_ERROR_TYPE(DimensionMismatchError);
PPKG_ERROR_TYPE(TripleExhaustedError);
PPKG_ERROR_TYPE(BadNormalizationError);
PPKG_ERROR_TYPE(DivisorRangeError);
PPKG_ERROR_TYPE(MagnitudeOverflowError);
PPKG_ERROR_TYPE(EmptyVectorError);
PPKG_ERROR_TYPE(RoundDesyncError);
PPKG_ERROR_TYPE(DeadlockError);
PPKG_ERROR_TYPE(ParseError);
PPKG_ERROR_TYPE(UnknownEntityError);
PPKG_ERROR_TYPE(NotCommonEntityError);
PPKG_ERROR_TYPE(IncompatibleRuleError);
PPKG_ERROR_TYPE(UnknownRelationError);
PPKG_ERROR_TYPE(BadSlotError);
PPKG_ERROR_TYPE(IsolatedVertexError);
PPKG_ERROR_TYPE(EmptyCandidatesError);
PPKG_ERROR_TYPE(ConfigError);

#undef PPKG_ERROR_TYPE

}  // namespace ppkg
