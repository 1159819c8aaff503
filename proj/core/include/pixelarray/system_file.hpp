#pragma once

#include <string>

#include "pixelarray/solver.hpp"

namespace pixelarray {

// Line-oriented system description:
//
//   # comment
//   relation <id>: <expr> <cmp> <expr>
//   var <name>[,<name>...] in [<lo>,<hi>) res <r>
//   expose <name>[,<name>...]
//   tol <id|*> <eps>
//
// Only half-open ranges are accepted. Errors carry the offending line number.
SystemSpec parse_system_file(const std::string& text);

SystemSpec load_system_file(const std::string& path);

}  // namespace pixelarray
