#pragma once

#include <stdexcept>
#include <string>

namespace medcheck {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// corpus
struct MalformedLine : Error {
  using Error::Error;
};
struct DuplicateSentenceId : Error {
  using Error::Error;
};
struct NonMonotonicIds : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct SchemaError : Error {
  using Error::Error;
};
struct InvariantViolation : Error {
  using Error::Error;
};

// backend
struct TransportError : Error {
  using Error::Error;
};
struct AuthError : Error {
  using Error::Error;
};
struct RateLimited : Error {
  using Error::Error;
};
struct ScriptExhausted : Error {
  using Error::Error;
};

// optimizer
struct EmptyPool : Error {
  using Error::Error;
};
struct ReflectionParseError : Error {
  using Error::Error;
};
struct BudgetTooSmall : Error {
  using Error::Error;
};

// metrics / persistence
struct CorruptRecord : Error {
  using Error::Error;
};
struct MismatchedPairing : Error {
  using Error::Error;
};

// cli / config
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace medcheck
