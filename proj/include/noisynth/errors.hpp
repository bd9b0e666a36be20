#pragma once

#include <stdexcept>
#include <string>

namespace noisynth {

// Invalid user-supplied input: malformed grammar/config files, out-of-range
// parameters, schema violations. The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Failure while evaluating a program: unbound variable, builtin type
// mismatch, integer overflow. Carries a rendering of the offending node.
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace noisynth
