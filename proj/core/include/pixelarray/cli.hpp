#pragma once

namespace pixelarray::cli {

// pixelsolve entry point. Subcommands: solve, plan, oracle, bench, demo.
// Exit codes: 0 success, 1 usage, 2 input error, 3 budget exceeded.
int run(int argc, const char* const* argv);

}  // namespace pixelarray::cli
