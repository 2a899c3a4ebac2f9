#pragma once

namespace qnls::cli {

// qnls [--config FILE] [--out DIR] [--threads K] <subcommand> [--key value ...]
// Returns 0 on success, 2 for invalid configuration, 3 for regime errors, 1 otherwise.
int run(int argc, const char* const* argv);

}  // namespace qnls::cli
