#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ltcoin::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kSolver = 2, kValidation = 3 };

// args excludes the program name
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// temp file + rename
void write_atomically(const std::string& path, const std::string& content);

}  // namespace ltcoin::cli
