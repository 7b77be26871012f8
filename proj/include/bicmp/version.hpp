#pragma once

namespace bicmp {
inline constexpr const char* kVersion = "0.1.0";
}
