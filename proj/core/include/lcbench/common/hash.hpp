#pragma once

#include <cstdint>
#include <string>

namespace lcbench::common {

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64_file(const std::string& path);  // throws if unreadable
std::string hash_hex(std::uint64_t h);

}  // namespace lcbench::common
