#ifndef IDENTLINK_CLI_HPP
#define IDENTLINK_CLI_HPP

#include <string>
#include <vector>

namespace identlink {

// Entry point behind the identlink binary; args exclude the program
// name.  Returns 0 on success, 1 when a validation-style subcommand
// fails its check, 2 on usage or input errors.
int cli_dispatch(std::vector<std::string> args);

}  // namespace identlink

#endif  // IDENTLINK_CLI_HPP
