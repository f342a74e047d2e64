#pragma once

#include <stdexcept>
#include <string>

namespace docforge {

/// Base for every failure raised by the library. `stage()` names the
/// subsystem that raised it ("ingestion", "prompt", "llm", ...), so callers
/// can report failures with stage labels without string matching.
class Error : public std::runtime_error {
public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

/// Bad input: malformed ids, violated preconditions, invalid configuration.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A failure that may succeed if retried later. Carries how many attempts
/// were made before giving up.
class RetriableError : public Error {
public:
  RetriableError(std::string stage, const std::string& what, int attempts)
      : Error(std::move(stage), what), attempts_(attempts) {}

  int attempts() const noexcept { return attempts_; }

private:
  int attempts_;
};

/// A failure that retrying will not fix.
class TerminalError : public Error {
public:
  using Error::Error;
};

class AuthenticationError : public TerminalError {
public:
  using TerminalError::TerminalError;
};

class QuotaError : public TerminalError {
public:
  using TerminalError::TerminalError;
};

class UnknownRepositoryError : public TerminalError {
public:
  using TerminalError::TerminalError;
};

}  // namespace docforge
