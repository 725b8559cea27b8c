#pragma once

namespace dxtk {

inline constexpr const char* kVersion = "0.1.0";

// Schema version stamped on every file record and service body.
inline constexpr int kFormatVersion = 1;

}  // namespace dxtk
