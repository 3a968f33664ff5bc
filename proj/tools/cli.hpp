#pragma once

#include <string>
#include <vector>

namespace gridcast::cli {

/// Runs one gridcast invocation (subcommand + flags, without argv[0]) and
/// returns the process exit code. 0 means every requested artifact was
/// written.
int run(const std::vector<std::string>& args);

} // namespace gridcast::cli
