#pragma once

#include <string>
#include <vector>

namespace agentcourt {

// One CLI invocation with argv-style arguments, program name excluded.
// Exit codes: 0 success, 1 partial failures (some trials or questions
// failed), 2 usage or configuration errors.
int cli_run(const std::vector<std::string>& args);

}  // namespace agentcourt
