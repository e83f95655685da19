#pragma once

#include <stdexcept>
#include <string>

namespace qshard {

/// Broad failure classes; the CLI maps each to a distinct exit code.
enum class ErrorCategory {
    kDomain,
    kLocality,
    kCapacity,
    kParse,
    kCompile,
    kProtocol,
    kTimeout,
    kResource,
    kState,
    kContract,
};

const char *category_name(ErrorCategory category);

class Error : public std::runtime_error {
  public:
    Error(ErrorCategory category, const std::string &what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

  private:
    ErrorCategory category_;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    explicit DomainError(const std::string &what) : Error(ErrorCategory::kDomain, what) {}
};

/// A kernel or measurement addressed a bit that is not local to the shard.
struct LocalityError : Error {
    explicit LocalityError(const std::string &what) : Error(ErrorCategory::kLocality, what) {}
};

struct CapacityError : Error {
    explicit CapacityError(const std::string &what) : Error(ErrorCategory::kCapacity, what) {}
};

struct CompileError : Error {
    explicit CompileError(const std::string &what) : Error(ErrorCategory::kCompile, what) {}
};

struct ProtocolError : Error {
    explicit ProtocolError(const std::string &what) : Error(ErrorCategory::kProtocol, what) {}
};

struct TimeoutError : Error {
    explicit TimeoutError(const std::string &what) : Error(ErrorCategory::kTimeout, what) {}
};

struct ResourceError : Error {
    explicit ResourceError(const std::string &what) : Error(ErrorCategory::kResource, what) {}
};

/// The simulated state failed a numerical sanity check (norm drift, NaN).
struct StateError : Error {
    explicit StateError(const std::string &what) : Error(ErrorCategory::kState, what) {}
};

struct ContractError : Error {
    explicit ContractError(const std::string &what) : Error(ErrorCategory::kContract, what) {}
};

/// Parse failure with a 1-based source position.
class ParseError : public Error {
  public:
    ParseError(int line, int column, const std::string &message);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string &message() const noexcept { return message_; }

  private:
    int line_;
    int column_;
    std::string message_;
};

}  // namespace qshard
