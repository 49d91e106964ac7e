#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace advr {

// Malformed or invariant-violating config documents (guideline dictionaries,
// norm tables, run configs). The message names the offending field.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_, const std::string& message)
      : std::runtime_error(field_ + ": " + message), field(std::move(field_)) {}
};

// Transport / protocol failures of a remote backend (NLI, Thinker). Carries
// the underlying cause; the caller decides whether to retry.
struct BackendError : std::runtime_error {
  std::string cause;
  BackendError(const std::string& what, std::string cause_)
      : std::runtime_error(what + ": " + cause_), cause(std::move(cause_)) {}
};

}  // namespace advr
