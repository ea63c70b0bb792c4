#pragma once

#include <stdexcept>
#include <string>

namespace coarsegeo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unknown generator symbol or malformed word.
class AlphabetError : public Error {
 public:
  using Error::Error;
};

// Operands built from different group models.
class ModelMismatchError : public Error {
 public:
  using Error::Error;
};

// A ball or enumeration would exceed its configured budget, or a
// construction needs a larger radius than was supplied.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// A rate table has no bucket covering the requested argument.
class IncompleteInputError : public Error {
 public:
  using Error::Error;
};

// Malformed decomposition or path (pieces do not chain, bad tags...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A word handed to the HNN machinery is not Britton-reduced.
class ReductionError : public Error {
 public:
  using Error::Error;
  std::size_t index = 0;
};

// A combination fixture fails its own validity checks.
class FixtureError : public Error {
 public:
  using Error::Error;
};

}  // namespace coarsegeo
