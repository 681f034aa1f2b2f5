#pragma once

namespace taukit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace taukit
