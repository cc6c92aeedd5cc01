#pragma once

#include <string>
#include <vector>

namespace pooling::cli {

// Dispatches one command-line invocation (argv without the program name).
// Returns 0 on success, 1 on a domain error (bad data, failed validation,
// solver failure), 2 on a usage error.  Diagnostics go to standard error;
// data goes to standard output or the requested output files.
int run(const std::vector<std::string>& args);

}  // namespace pooling::cli
