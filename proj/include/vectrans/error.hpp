#pragma once

#include <stdexcept>
#include <string>

namespace vectrans {

/// Base of every error the library throws. Callers that only need to know
/// "something operational went wrong" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define VECTRANS_DEFINE_ERROR(Name)   \
  class Name : public Error {         \
   public:                            \
    using Error::Error;               \
  }

VECTRANS_DEFINE_ERROR(IoError);
VECTRANS_DEFINE_ERROR(ParseError);
VECTRANS_DEFINE_ERROR(CompileError);
VECTRANS_DEFINE_ERROR(ToolMissing);
VECTRANS_DEFINE_ERROR(TimeoutError);
VECTRANS_DEFINE_ERROR(ConfigError);
VECTRANS_DEFINE_ERROR(SchemaMismatch);
VECTRANS_DEFINE_ERROR(SlotMissing);
VECTRANS_DEFINE_ERROR(ProviderError);
VECTRANS_DEFINE_ERROR(TranscriptExhausted);
VECTRANS_DEFINE_ERROR(TranscriptMismatch);
VECTRANS_DEFINE_ERROR(MarkerNotFound);
VECTRANS_DEFINE_ERROR(PromptTooLarge);
VECTRANS_DEFINE_ERROR(EmptyInput);
VECTRANS_DEFINE_ERROR(NonPositiveValue);
VECTRANS_DEFINE_ERROR(BenchError);

#undef VECTRANS_DEFINE_ERROR

}  // namespace vectrans
