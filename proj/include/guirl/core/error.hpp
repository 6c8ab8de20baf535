#pragma once

#include <stdexcept>
#include <string>

namespace guirl {

// Base class for all rejections raised by library operations.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Precondition or invariant violated by caller-supplied data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A read-only procedure attempted (or produced) a mutation.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Remote call failed at the transport level; safe to retry.
class TransportError : public Error {
 public:
  using Error::Error;
};

// A reply arrived but could not be interpreted. Carries the raw payload.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw_payload)
      : Error(what), raw_payload_(std::move(raw_payload)) {}
  const std::string& raw_payload() const { return raw_payload_; }

 private:
  std::string raw_payload_;
};

}  // namespace guirl
