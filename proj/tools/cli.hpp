#pragma once

#include <iosfwd>

namespace debut {

/// Exit codes: 0 success, 1 semantic failure (invalid chain, failed bipolar test,
/// shape mismatch), 2 unreadable input or bad arguments.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace debut
