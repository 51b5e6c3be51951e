#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fuelrod {

/// Entry point of the `fuelrod` tool. `args` excludes the program name.
/// Results go to `out`; failures are reported on `err` as one JSON object
/// {"error", "message", "exit_code"} and mapped to a nonzero exit status.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_run(int argc, char** argv);

}  // namespace fuelrod
