#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ckn::cli {

// args excludes the program name; returns the process exit code
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ckn::cli
