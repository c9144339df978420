#pragma once

namespace iccool {
inline constexpr const char* kVersion = "0.1.0";
}
