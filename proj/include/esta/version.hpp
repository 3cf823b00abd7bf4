#pragma once

namespace esta {

inline constexpr const char* kVersion = "0.1.0";

} // namespace esta
