#pragma once

#include <stdexcept>
#include <string>

namespace sbmase {

// Base of every error thrown by the library. Callers that only care about
// "something went wrong in sbmase" catch this; the derived types name the
// specific contract that was violated.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SBMASE_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// Argument or state outside an operation's documented domain.
SBMASE_DEFINE_ERROR(PreconditionError);
// Model parameters violate the BlockModel invariants.
SBMASE_DEFINE_ERROR(InvalidModel);
// Numerical rank of P disagrees with the declared rank.
SBMASE_DEFINE_ERROR(DegenerateRank);
// Two blocks have identical latent vectors, so beta = 0.
SBMASE_DEFINE_ERROR(DegenerateModel);
// LAPACK reported that an iterative decomposition did not converge.
SBMASE_DEFINE_ERROR(ConvergenceFailure);
// Zero-degree node makes D^{-1/2} undefined.
SBMASE_DEFINE_ERROR(IsolatedNode);
// Exhaustive clustering would enumerate more than the allowed assignments.
SBMASE_DEFINE_ERROR(TooLarge);
// Estimated block with no members.
SBMASE_DEFINE_ERROR(EmptyBlock);
// Estimated block with a single member (diagonal of P-hat undefined).
SBMASE_DEFINE_ERROR(SingletonBlock);

// File ingestion errors.
SBMASE_DEFINE_ERROR(ParseError);
SBMASE_DEFINE_ERROR(OutOfRange);
SBMASE_DEFINE_ERROR(SelfLoop);
SBMASE_DEFINE_ERROR(MissingNode);
SBMASE_DEFINE_ERROR(DuplicateNode);

#undef SBMASE_DEFINE_ERROR

}  // namespace sbmase
