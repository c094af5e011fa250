#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace driftdet {

enum class ErrorCode {
  FileNotFound,
  FormatError,
  EmptyCorpus,
  EmptyAfterCleaning,
  DegenerateVocabulary,
  DimensionMismatch,
  NoRepresentableTokens,
  ProviderError,
  InsufficientData,
  NonFiniteLoss,
  ChecksumMismatch,
  VersionUnsupported,
  MissingFile,
  UnlabeledDocument,
  ClassTooSmall,
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. The code name is the stable,
/// machine-readable part; `what()` is "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

  // Row or line number for FormatError, when known.
  std::optional<std::size_t> location;
  // HTTP status for ProviderError; 0 when no response was received.
  int status = 0;

  static Error format(std::size_t where, const std::string& detail);

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace driftdet
