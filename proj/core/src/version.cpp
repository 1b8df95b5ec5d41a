#include "tsvsim/version.hpp"

namespace tsvsim {

std::string_view version() noexcept { return TSVSIM_VERSION; }

}  // namespace tsvsim
