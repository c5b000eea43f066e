#pragma once

#include <stdexcept>
#include <string>

namespace kab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define KAB_ERROR(Name)                  \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

KAB_ERROR(SaturationDerivedUnsat);
KAB_ERROR(RewriteBlowup);
KAB_ERROR(NonDomainIndependent);
KAB_ERROR(CombinatorialLimit);
KAB_ERROR(PreconditionViolated);
KAB_ERROR(UngroundedDeletion);
KAB_ERROR(OracleIncomplete);
KAB_ERROR(StateLimitExceeded);
KAB_ERROR(RunBoundExceeded);
KAB_ERROR(FormulaNotNNF);
KAB_ERROR(VocabularyCollision);
KAB_ERROR(NonMonotoneFixpoint);
KAB_ERROR(ValidationError);

#undef KAB_ERROR

class ParseError : public Error {
 public:
  ParseError(int line, int col, const std::string& msg)
      : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line;
  int col;
};

}  // namespace kab
