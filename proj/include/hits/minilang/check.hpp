#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hits/minilang/ast.hpp"

namespace hits::minilang {

struct CheckError {
  int line = 0;
  std::string message;
};

/// Static checks over one or more compilation units treated as a single
/// namespace: unique names, resolved callees, arity and type agreement,
/// declared-before-use variables. Returns the first error found.
std::optional<CheckError> check_units(
    const std::vector<const Program*>& units);

inline std::optional<CheckError> check_program(const Program& p) {
  return check_units({&p});
}

}  // namespace hits::minilang
