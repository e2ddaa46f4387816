#pragma once

#include <string>
#include <vector>

namespace vsl::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kOk = 0, kUsageError = 1, kRuntimeError = 2 };

/// Runs one command; `args` excludes the program name, e.g.
/// {"extract", "--frames", "in", "--out", "feats"}. Diagnostics go to stderr.
int run(const std::vector<std::string>& args);

int main(int argc, char** argv);

}  // namespace vsl::cli
