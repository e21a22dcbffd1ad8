#pragma once

#include <string>
#include <vector>

namespace shrinkem::cli {

/// Runs a full command line ("simulate", "estimate", "filter",
/// "replicate-figure" plus flags). Returns the process exit code:
/// 0 success, 1 invalid input or flags, 2 model-infeasible data.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace shrinkem::cli
