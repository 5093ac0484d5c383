#pragma once

#include <stdexcept>
#include <string>

namespace brc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the domain of a generator or family.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Scaled skew divergence requested at alpha in {0, 1}.
class ScaleError : public Error {
 public:
  using Error::Error;
};

/// Weights are negative, all zero, or not normalized.
class WeightError : public Error {
 public:
  using Error::Error;
};

/// A divergence came out more negative than round-off allows.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

class NotPDError : public Error {
 public:
  using Error::Error;
};

class DegenerateClusterError : public Error {
 public:
  using Error::Error;
};

class EmptyClusterError : public Error {
 public:
  using Error::Error;
};

/// Malformed input payload (JSON, CSV, PPM).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace brc
