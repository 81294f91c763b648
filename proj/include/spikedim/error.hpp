// error.hpp - exception type shared by every spikedim module.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spikedim {

enum class ErrorKind {
  NonFiniteInput,
  TooFewRows,
  KOutOfRange,
  DegenerateTrailingBlock,
  InsufficientDf,
  InvalidArgument,
  InvalidModel,
  InvalidSetting,
  InvalidExponent,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// All library failures surface as this exception; `kind()` lets callers
/// (notably the CLI) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace spikedim
