#pragma once

namespace ehn::cli {

/// Parses arguments and runs one command. Returns the process exit code:
/// 0 when every output was written, 1 otherwise.
int run(int argc, char** argv);

}  // namespace ehn::cli
