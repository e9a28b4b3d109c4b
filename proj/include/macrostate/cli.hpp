#pragma once

#include <string>
#include <vector>

namespace macrostate::cli {

/// Run one subcommand (args exclude the program name). Returns 0 on success,
/// 1 for data/feasibility errors, 2 for usage errors.
int run(const std::vector<std::string>& args);

}  // namespace macrostate::cli
