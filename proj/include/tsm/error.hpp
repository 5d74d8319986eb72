#pragma once

#include <stdexcept>
#include <string>

namespace tsm {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing configuration file (stopwords, lemma table, flags).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed data file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Caller supplied inputs that violate a precondition (empty context, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// A score could not be measured (no embeddable words, zero mean vector).
class ScoringError : public Error {
 public:
  using Error::Error;
};

// Similarity of a zero vector or of vectors of different lengths.
class DomainError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace tsm
