#pragma once

#include <stdexcept>
#include <string>

namespace mcdp {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An element or antichain used outside the space it belongs to.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Ill-typed series/parallel/loop composition.
class CompositionError : public Error {
 public:
  using Error::Error;
};

// Operation not available for the given space (e.g. enumerating R+).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcdp
