#pragma once

namespace crlfscan {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kUserAgent = "crlfscan/0.1.0";

}  // namespace crlfscan
