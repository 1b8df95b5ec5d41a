#pragma once

#include <string_view>

namespace tsvsim {

std::string_view version() noexcept;

}  // namespace tsvsim
