#pragma once

#include <stdexcept>
#include <string>

namespace serrehom {

// Base for every library error.  The CLI maps subclasses onto its exit-code
// contract: input/contract violations -> 2, precision failures -> 3,
// internal invariant breakage -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SERREHOM_ERROR(NAME)                          \
  struct NAME : Error {                               \
    NAME() : Error(#NAME) {}                          \
    explicit NAME(const std::string& m) : Error(std::string(#NAME) + ": " + m) {} \
  }

SERREHOM_ERROR(RankMismatch);
SERREHOM_ERROR(NotSublattice);
SERREHOM_ERROR(ZeroIdeal);
SERREHOM_ERROR(DivisionByZero);
SERREHOM_ERROR(GroupMismatch);
SERREHOM_ERROR(RingMismatch);
SERREHOM_ERROR(DimensionMismatch);
SERREHOM_ERROR(UnsupportedGroup);
SERREHOM_ERROR(NotSurjective);
SERREHOM_ERROR(NotSection);
SERREHOM_ERROR(NotEquivariant);
SERREHOM_ERROR(NotLatticeMap);
SERREHOM_ERROR(NotIsogeny);
SERREHOM_ERROR(NotExactInput);
SERREHOM_ERROR(BadDiscriminant);
SERREHOM_ERROR(NotUpperHalfPlane);
SERREHOM_ERROR(PrecisionUnachievable);
SERREHOM_ERROR(PrecisionExhausted);
SERREHOM_ERROR(OperationCancelled);
SERREHOM_ERROR(InvariantViolation);
SERREHOM_ERROR(ParseError);

#undef SERREHOM_ERROR

}  // namespace serrehom
