#pragma once

namespace hstrn {
inline constexpr const char* kVersion = "0.1.0";
}
