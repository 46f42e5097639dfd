#pragma once

#include <stdexcept>
#include <string>

namespace prmforge {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or a broken type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Tagged chain-of-thought extraction failures ("no steps", "no answer",
// "malformed tags") and malformed record lines.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Rollout ledger empty before any draw could be made.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

// Network failure that persisted through the retry policy.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Endpoint rejected the credentials.
class AuthError : public Error {
 public:
  using Error::Error;
};

// Service replied with something structurally wrong (bad JSON, wrong
// number of probabilities, missing choices).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Filesystem / stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace prmforge
