#pragma once

namespace relayq {
inline constexpr const char* kVersion = "0.1.0";
}
