#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace grf {

using Sha256 = std::array<uint8_t, 32>;

Sha256 sha256(const void* data, size_t len);
Sha256 sha256(const std::vector<uint8_t>& bytes);
std::string to_hex(const Sha256& h);

} // namespace grf
