#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace nkpa::detail {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(const void* data, std::size_t len);

inline Digest sha256(std::string_view s) { return sha256(s.data(), s.size()); }

std::string hex(const Digest& d);

}  // namespace nkpa::detail
