#pragma once

namespace bnpnc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bnpnc
