#pragma once

namespace eitflash {
inline constexpr const char* version = "0.1.0";
}
