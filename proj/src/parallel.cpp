#include "toalab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace toalab {

unsigned worker_count() {
  if (const char* env = std::getenv("TOA_LAB_THREADS")) {
    try {
      const long value = std::stol(env);
      return value <= 1 ? 1U : static_cast<unsigned>(value);
    } catch (...) {
      return 1;
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

} // namespace toalab
