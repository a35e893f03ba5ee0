#pragma once

namespace kgqa {

// Entry point behind the `gskgqa` binary; exposed so tests can drive the
// subcommands in-process. Returns the process exit status.
int run_cli(int argc, const char* const* argv);

}  // namespace kgqa
