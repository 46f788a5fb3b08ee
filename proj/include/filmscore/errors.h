#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace filmscore {

/// Base of every error the engine reports. Callers that only need a message
/// can catch this; the subclasses carry structured detail.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input-side problems: corpora and analysis documents that do not parse.
/// The CLI maps these to exit status 2 and the service to HTTP 400.
class InputError : public Error {
 public:
  using Error::Error;
};

class MalformedChord : public InputError {
 public:
  MalformedChord(std::string token, std::size_t position)
      : InputError("malformed chord '" + token + "' at position " + std::to_string(position)),
        token_(std::move(token)),
        position_(position) {}

  const std::string& token() const { return token_; }
  std::size_t position() const { return position_; }

 private:
  std::string token_;
  std::size_t position_;
};

class EmptyCorpus : public InputError {
 public:
  explicit EmptyCorpus(const std::string& what) : InputError("empty corpus: " + what) {}
};

class SchemaError : public InputError {
 public:
  SchemaError(std::string path, std::string reason)
      : InputError("schema error at '" + path + "': " + reason),
        path_(std::move(path)),
        reason_(std::move(reason)) {}

  const std::string& path() const { return path_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string path_;
  std::string reason_;
};

class EmptyAnalysis : public InputError {
 public:
  EmptyAnalysis() : InputError("analysis contains no frames") {}
};

class NoFaces : public Error {
 public:
  NoFaces() : Error("no frame contains a face") {}
};

class UnknownCharacter : public Error {
 public:
  explicit UnknownCharacter(std::string id)
      : Error("unknown character '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& what) : Error("insufficient data: " + what) {}
};

class BadArity : public Error {
 public:
  BadArity(int k, int n)
      : Error("euclidean rhythm needs 0 <= k <= n and n >= 1, got k=" + std::to_string(k) +
              " n=" + std::to_string(n)) {}
};

class TooShort : public Error {
 public:
  explicit TooShort(std::size_t events)
      : Error("melody needs at least 2 events, got " + std::to_string(events)) {}
};

class PoolTooSmall : public Error {
 public:
  PoolTooSmall(std::size_t size, std::size_t k)
      : Error("pool of " + std::to_string(size) + " candidates cannot supply " +
              std::to_string(k)) {}
};

class MissingAssignment : public Error {
 public:
  explicit MissingAssignment(std::string character)
      : Error("no leitmotif assigned to character '" + character + "'"),
        character_(std::move(character)) {}
  const std::string& character() const { return character_; }

 private:
  std::string character_;
};

class EmptyPlan : public Error {
 public:
  EmptyPlan() : Error("cue plan has no cues") {}
};

}  // namespace filmscore
