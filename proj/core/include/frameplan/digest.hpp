#pragma once

#include <string>
#include <string_view>

namespace frameplan {

std::string sha256_hex(std::string_view bytes);
std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);  // throws ParseError on malformed input

}  // namespace frameplan
