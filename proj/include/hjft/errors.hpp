#pragma once

#include <stdexcept>
#include <string>

namespace hjft {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite or otherwise malformed arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

// Coefficient (a, g) outside the admissible box of a model.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Flux value above the peak H(0, a, g): no p with H(p) = h.
class NoPreimageError : public Error {
 public:
  using Error::Error;
};

// Value outside a covered range (guarded p-range, grid range, time range).
class RangeError : public Error {
 public:
  using Error::Error;
};

// Interface Riemann problem with no admissible flux-matching pair.
class UnsolvableError : public Error {
 public:
  using Error::Error;
};

// Failure inside the front-tracking engine (bad state, fuse, ...).
class SolverError : public Error {
 public:
  using Error::Error;
};

// Coefficient expressions that fail to parse or evaluate.
class SpecError : public Error {
 public:
  using Error::Error;
};

// Configuration schema violations; the message carries the field path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace hjft
