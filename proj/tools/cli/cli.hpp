#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace deepbarcode::cli {

/// Runs one command. `args` excludes the program name.
/// Returns 0 on success, 1 on data or I/O errors, 2 on usage or
/// configuration errors.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace deepbarcode::cli
