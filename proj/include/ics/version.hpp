#pragma once

namespace ics {

inline constexpr const char* tool_version = "1.0.0";

}  // namespace ics
