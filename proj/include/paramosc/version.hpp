#pragma once

namespace paramosc {

inline constexpr const char* tool_name = "paramosc";
inline constexpr const char* tool_version = "0.1.0";

} // namespace paramosc
