#pragma once

#include <map>
#include <string>
#include <vector>

namespace adt {

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs argv[0] (PATH lookup) without a shell, capturing stdout and stderr.
// Throws adt::Error("process_error") if the process cannot be started.
CommandResult run_command(const std::vector<std::string>& argv);

// Splits `command_template` on whitespace and substitutes "{name}" with
// values[name] inside each token, so substituted values never get split.
// Unknown placeholders throw ConfigError.
std::vector<std::string> expand_command(const std::string& command_template,
                                        const std::map<std::string, std::string>& values);

}  // namespace adt
