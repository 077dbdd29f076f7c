#include "cubeval/int128.hpp"

#include <algorithm>
#include <cmath>

#include "cubeval/errors.hpp"

namespace cubeval {

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string to_string(i128 v) {
  if (v < 0) return "-" + to_string(abs_u128(v));
  return to_string(static_cast<u128>(v));
}

i128 parse_i128(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    negative = text[pos] == '-';
    ++pos;
  }
  std::size_t end = text.size();
  while (end > pos && (text[end - 1] == ' ' || text[end - 1] == '\t')) --end;
  if (pos == end) throw InvalidInput("empty integer literal");
  constexpr u128 kLimit = u128(1) << 127;
  u128 acc = 0;
  for (std::size_t i = pos; i < end; ++i) {
    char c = text[i];
    if (c < '0' || c > '9') {
      throw InvalidInput("invalid integer literal '" + std::string(text) + "'");
    }
    acc = acc * 10 + static_cast<u128>(c - '0');
    if (acc > kLimit) throw InvalidInput("integer literal out of range");
  }
  if (!negative && acc == kLimit) throw InvalidInput("integer literal out of range");
  return negative ? -static_cast<i128>(acc - 1) - 1 : static_cast<i128>(acc);
}

uint64_t isqrt(uint64_t n) {
  auto r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

u128 isqrt(u128 n) {
  if (n < (u128(1) << 64)) return isqrt(static_cast<uint64_t>(n));
  // Newton from an overestimate.
  u128 x = static_cast<u128>(std::sqrt(static_cast<long double>(n))) + 2;
  while (true) {
    u128 y = (x + n / x) / 2;
    if (y >= x) break;
    x = y;
  }
  constexpr u128 kRootMax = (u128(1) << 64) - 1;
  if (x > kRootMax) x = kRootMax;
  while (x * x > n) --x;
  while (x < kRootMax && (x + 1) * (x + 1) <= n) ++x;
  return x;
}

}  // namespace cubeval
