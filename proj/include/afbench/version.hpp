#pragma once

namespace afbench {
inline constexpr const char* kVersion = "0.1.0";
}
