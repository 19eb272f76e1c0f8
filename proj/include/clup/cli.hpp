#pragma once

namespace clup {

// Command-line entry point (exposed for testing). Exit codes: 0 success,
// 1 configuration/usage error, 2 runtime failure.
int cli_main(int argc, const char* const* argv);

}  // namespace clup
