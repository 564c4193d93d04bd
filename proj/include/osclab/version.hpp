#pragma once

namespace osclab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace osclab
