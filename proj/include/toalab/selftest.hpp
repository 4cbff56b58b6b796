#pragma once

#include <iosfwd>

namespace toalab {

/// Quick invariant suite over the whole pipeline. Prints one line per check
/// and returns the number of failed checks.
int run_selftest(std::ostream& out);

} // namespace toalab
