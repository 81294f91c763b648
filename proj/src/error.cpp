#include "spikedim/error.hpp"

namespace spikedim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFiniteInput: return "NonFiniteInput";
    case ErrorKind::TooFewRows: return "TooFewRows";
    case ErrorKind::KOutOfRange: return "KOutOfRange";
    case ErrorKind::DegenerateTrailingBlock: return "DegenerateTrailingBlock";
    case ErrorKind::InsufficientDf: return "InsufficientDf";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::InvalidSetting: return "InvalidSetting";
    case ErrorKind::InvalidExponent: return "InvalidExponent";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace spikedim
