#pragma once

#include <string>
#include <vector>

namespace odormap::cli {

// Runs one subcommand. args excludes the program name. Returns 0 on
// success, 1 on domain errors (one-line "error: ..." on stderr), 2 on
// usage errors.
int dispatch(const std::vector<std::string>& args);

}  // namespace odormap::cli
