#pragma once

#include <stdexcept>
#include <string>

namespace lwb {

/// Base for every domain error raised by the library. The CLI maps these to
/// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A natural number that does not decode to an object of the requested kind.
class MalformedCode : public Error {
 public:
  explicit MalformedCode(const std::string& what) : Error("malformed code: " + what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("parse error: " + what) {}
};

class EnumerationTooLarge : public Error {
 public:
  explicit EnumerationTooLarge(const std::string& what)
      : Error("enumeration too large: " + what) {}
};

class ModeMismatch : public Error {
 public:
  explicit ModeMismatch(const std::string& what) : Error("mode mismatch: " + what) {}
};

class SignatureMismatch : public Error {
 public:
  explicit SignatureMismatch(const std::string& what)
      : Error("signature mismatch: " + what) {}
};

class MalformedProof : public Error {
 public:
  explicit MalformedProof(const std::string& what) : Error("malformed proof: " + what) {}
};

}  // namespace lwb
