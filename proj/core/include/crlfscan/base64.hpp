#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace crlfscan {

std::string base64_encode(std::string_view in);

/// Strict decode of padded standard-alphabet base64; nullopt on bad input.
std::optional<std::string> base64_decode(std::string_view in);

}  // namespace crlfscan
