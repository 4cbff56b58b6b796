#pragma once

#include <iosfwd>

namespace toalab::cli {

/// Entry point of the toa_lab tool. Returns the process exit status:
/// 0 on success, 2 on usage errors, 1 on any other failure.
int run(int argc, const char* const* argv);

} // namespace toalab::cli
