#pragma once

namespace lcbench {
inline constexpr const char* kVersion = "0.1.0";
}
