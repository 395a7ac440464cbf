#pragma once

namespace pxplab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "pxplab";

}  // namespace pxplab
