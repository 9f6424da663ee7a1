#pragma once

namespace ico {

inline constexpr const char* kCodeVersion = "icosched 0.1.0";

}  // namespace ico
