#pragma once

#include <string>
#include <vector>

namespace ritype::cli {

// Runs one command given the arguments after the program name. Errors are
// printed to stderr as a single "ERROR:<code>: message" line; the return
// value is the process exit code (0 ok, 2 input, 3 parameter, 4 statistical
// precondition).
int run(std::vector<std::string> args);

}  // namespace ritype::cli
