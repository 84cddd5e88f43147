#pragma once

#include <string>

namespace xf {

/// Batch pipeline driver. Subcommands: field | partition | prescribe |
/// compare | render. Exit codes: 0 success, 1 input error,
/// 2 non-convergence, 3 partition failure.
int cli_main(int argc, char** argv);

}  // namespace xf
