#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "uspdisc/types.hpp"

namespace uspdisc {

// Root of every error thrown by the library. Precondition violations on
// plain arguments use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Unreachable : public Error {
 public:
  Unreachable(NodeId s, NodeId t)
      : Error("node " + std::to_string(t) + " unreachable from " +
              std::to_string(s)),
        source(s),
        target(t) {}
  NodeId source;
  NodeId target;
};

class NegativeWeight : public Error {
 public:
  using Error::Error;
};

class TieDetected : public Error {
 public:
  TieDetected(NodeId s, NodeId t)
      : Error("shortest path " + std::to_string(s) + " -> " +
              std::to_string(t) + " is not unique"),
        source(s),
        target(t) {}
  NodeId source;
  NodeId target;
};

class GenerationFailed : public Error {
 public:
  using Error::Error;
};

class InconsistentSystem : public Error {
 public:
  using Error::Error;
};

class NotBipartite : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class DegenerateMatrix : public Error {
 public:
  using Error::Error;
};

class ParamRangeEmpty : public Error {
 public:
  using Error::Error;
};

class VerificationFailed : public Error {
 public:
  VerificationFailed(std::size_t index, const std::string& what)
      : Error("path " + std::to_string(index) + ": " + what),
        path_index(index) {}
  std::size_t path_index;
};

class NotPowerOfTwo : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace uspdisc
