#include "qshard/error.hpp"

namespace qshard {

const char *category_name(ErrorCategory category) {
    switch (category) {
    case ErrorCategory::kDomain: return "domain";
    case ErrorCategory::kLocality: return "locality";
    case ErrorCategory::kCapacity: return "capacity";
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kCompile: return "compile";
    case ErrorCategory::kProtocol: return "protocol";
    case ErrorCategory::kTimeout: return "timeout";
    case ErrorCategory::kResource: return "resource";
    case ErrorCategory::kState: return "state";
    case ErrorCategory::kContract: return "contract";
    }
    return "unknown";
}

ParseError::ParseError(int line, int column, const std::string &message)
    : Error(ErrorCategory::kParse,
            std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line), column_(column), message_(message) {}

}  // namespace qshard
