#pragma once

#include <stdexcept>
#include <string>

namespace vertcover {

// Base error: every failure carries a stable code (the class name) plus a
// human-readable message naming the offending inputs.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define VERTCOVER_DEFINE_ERROR(NAME)                                     \
  class NAME : public Error {                                            \
   public:                                                               \
    explicit NAME(const std::string& msg) : Error(#NAME, msg) {}         \
  }

VERTCOVER_DEFINE_ERROR(DomainError);
VERTCOVER_DEFINE_ERROR(EvalError);
VERTCOVER_DEFINE_ERROR(RefinementLimit);
VERTCOVER_DEFINE_ERROR(SelfIntersection);
VERTCOVER_DEFINE_ERROR(DegenerateLine);
VERTCOVER_DEFINE_ERROR(OriginOutside);
VERTCOVER_DEFINE_ERROR(NoOriginCell);
VERTCOVER_DEFINE_ERROR(SingularityOnPath);
VERTCOVER_DEFINE_ERROR(ExclusionMissing);
VERTCOVER_DEFINE_ERROR(LiftNegative);
VERTCOVER_DEFINE_ERROR(AssemblyGap);
VERTCOVER_DEFINE_ERROR(NoContainmentRadius);
VERTCOVER_DEFINE_ERROR(OddLayerCount);
VERTCOVER_DEFINE_ERROR(NotATranslate);
VERTCOVER_DEFINE_ERROR(UncertifiedMap);
VERTCOVER_DEFINE_ERROR(ConfigError);
VERTCOVER_DEFINE_ERROR(IoError);

#undef VERTCOVER_DEFINE_ERROR

}  // namespace vertcover
