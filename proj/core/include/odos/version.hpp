#pragma once

namespace odos {
inline constexpr const char* kVersion = "0.1.0";
}
