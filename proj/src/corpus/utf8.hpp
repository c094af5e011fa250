#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace driftdet::detail {

// Invalid sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view text);
void append_utf8(std::string& out, char32_t cp);

}  // namespace driftdet::detail
