#pragma once

#include <stdexcept>
#include <string>

namespace retro {

/// Caller supplied something the contract rejects (bad symbol, malformed record, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation is illegal in the object's current state (finished session, closed handle).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// On-disk data is corrupt, truncated or written by an incompatible version.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace retro
