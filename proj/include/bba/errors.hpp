#pragma once

#include <stdexcept>
#include <string>

namespace bba {

// Base class for all harness errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input text (FEN, SMILES, Asymptote markers, numbered lists, ...).
// `offset` is a 0-based character offset into the offending string when known,
// or -1 when the error is not tied to a position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long offset = -1)
      : Error(what), offset_(offset) {}
  long offset() const { return offset_; }

 private:
  long offset_;
};

// Network / transport failure after the retry budget is exhausted.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Strict replay backend saw a request that is not in the cache.
class CacheMissError : public Error {
 public:
  CacheMissError(const std::string& what, std::string request_hash)
      : Error(what), hash_(std::move(request_hash)) {}
  const std::string& request_hash() const { return hash_; }

 private:
  std::string hash_;
};

// UCI engine failures: spawn, protocol timeout, missing score line.
class EngineError : public Error {
 public:
  using Error::Error;
};

// Prompt template problems: unbound placeholder, unknown binding,
// missing registry entry, stage/method mismatch.
class PromptError : public Error {
 public:
  using Error::Error;
};

// Dataset / run file schema problems, with the 1-based line when known.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, long line = -1)
      : Error(what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace bba
