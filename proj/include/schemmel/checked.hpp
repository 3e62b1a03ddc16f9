#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace schemmel {

using u32 = std::uint32_t;
using u64 = std::uint64_t;

namespace detail {
using u128 = unsigned __int128;
using i128 = __int128;
}  // namespace detail

[[nodiscard]] inline u64 checked_add(u64 a, u64 b) {
  u64 s;
  if (__builtin_add_overflow(a, b, &s)) throw std::overflow_error("64-bit addition overflow");
  return s;
}

[[nodiscard]] inline u64 checked_mul(u64 a, u64 b) {
  u64 p;
  if (__builtin_mul_overflow(a, b, &p)) throw std::overflow_error("64-bit multiplication overflow");
  return p;
}

[[nodiscard]] inline u64 checked_pow(u64 base, u32 exp) {
  u64 v = 1;
  while (exp--) v = checked_mul(v, base);
  return v;
}

namespace detail {

[[nodiscard]] inline u128 checked_mul128(u128 a, u128 b) {
  if (b != 0 && a > ~u128{0} / b) throw std::overflow_error("128-bit multiplication overflow");
  return a * b;
}

[[nodiscard]] inline u128 checked_pow128(u128 base, u64 exp) {
  u128 v = 1;
  while (exp--) v = checked_mul128(v, base);
  return v;
}

[[nodiscard]] inline u64 narrow_u64(u128 v) {
  if (v > u128{~u64{0}}) throw std::overflow_error("value exceeds 64 bits");
  return static_cast<u64>(v);
}

}  // namespace detail

// floor(sqrt(n))
[[nodiscard]] inline u64 isqrt(u64 n) {
  if (n == 0) return 0;
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  if (r == 0) r = 1;
  while (r > n / r) --r;
  while (r + 1 <= n / (r + 1)) ++r;
  return r;
}

}  // namespace schemmel
