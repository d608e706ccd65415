#pragma once

namespace vsaxmc::cli {

// Entry point of the command-line tool. Returns 0 on success, 1 on a usage
// error and 2 on a runtime error.
int run(int argc, char** argv);

}  // namespace vsaxmc::cli
