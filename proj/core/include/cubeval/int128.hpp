#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cubeval {

using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr u128 kU128Max = ~u128{0};

std::string to_string(u128 v);
std::string to_string(i128 v);

// Throws InvalidInput on malformed text or overflow.
i128 parse_i128(std::string_view text);

constexpr u128 abs_u128(i128 v) {
  return v < 0 ? u128(0) - u128(v) : u128(v);
}

// Floor of the square root.
u128 isqrt(u128 n);
uint64_t isqrt(uint64_t n);

}  // namespace cubeval
