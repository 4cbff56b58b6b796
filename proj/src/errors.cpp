#include "toalab/errors.hpp"

namespace toalab {

format_error::format_error(const std::string& what, std::uint64_t offset)
    : error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

} // namespace toalab
