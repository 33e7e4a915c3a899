#pragma once

#include <string>
#include <vector>

namespace adapt {

/// Subcommands: run, summarize, gen-tasks, oracle, sweep-depth. Returns 2
/// on usage, configuration and I/O errors.
int cli_main(int argc, char** argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace adapt
