#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bn2o {

std::string read_file(const std::string& path);

// Write via temp file + rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, std::string_view content);

std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

std::string base64_encode(const unsigned char* data, std::size_t len);
std::vector<unsigned char> base64_decode(std::string_view text);

}  // namespace bn2o
