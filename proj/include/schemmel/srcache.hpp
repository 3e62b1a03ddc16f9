#pragma once

#include <cstring>
#include <fstream>
#include <string>

#include "arith.hpp"

namespace schemmel {

// A cache file failed validation (bad magic, truncation, checksum, or a
// parameter mismatch).  The caller should recompute instead of trusting it.
struct cache_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// FNV-1a, 64 bit.  Used for cache integrity and output digests.
inline u64 fnv1a64(const void* data, std::size_t len, u64 h = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline u64 fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

namespace detail {

// Fixed-size little-endian header; values follow as raw u64s.
struct SrCacheHeader {
  char magic[8];
  u64 version;
  u64 r;
  u64 lo;
  u64 hi;
  u64 checksum;  // fnv1a64 over the value bytes
};

constexpr char kSrCacheMagic[8] = {'s', 'r', 't', 'a', 'b', 'l', 'e', '\0'};
constexpr u64 kSrCacheVersion = 1;

}  // namespace detail

inline void write_sr_cache(const SrTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw cache_error("cannot open " + path + " for writing");
  detail::SrCacheHeader h{};
  std::memcpy(h.magic, detail::kSrCacheMagic, sizeof h.magic);
  h.version = detail::kSrCacheVersion;
  h.r = table.r;
  h.lo = table.lo;
  h.hi = table.hi;
  h.checksum = fnv1a64(table.values.data(), table.values.size() * sizeof(u64));
  out.write(reinterpret_cast<const char*>(&h), sizeof h);
  out.write(reinterpret_cast<const char*>(table.values.data()),
            static_cast<std::streamsize>(table.values.size() * sizeof(u64)));
  out.flush();
  if (!out) throw cache_error("write to " + path + " failed");
}

inline SrTable read_sr_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cache_error("cannot open " + path);
  detail::SrCacheHeader h{};
  in.read(reinterpret_cast<char*>(&h), sizeof h);
  if (!in || std::memcmp(h.magic, detail::kSrCacheMagic, sizeof h.magic) != 0)
    throw cache_error(path + " is not a totient table cache");
  if (h.version != detail::kSrCacheVersion)
    throw cache_error(path + " has cache version " + std::to_string(h.version) + ", expected " +
                      std::to_string(detail::kSrCacheVersion));
  if (h.lo < 1 || h.lo > h.hi || h.hi - h.lo + 1 > (u64{1} << 32))
    throw cache_error(path + " declares an implausible range");

  SrTable table{h.r, h.lo, h.hi, {}};
  table.values.resize(static_cast<std::size_t>(h.hi - h.lo + 1));
  in.read(reinterpret_cast<char*>(table.values.data()),
          static_cast<std::streamsize>(table.values.size() * sizeof(u64)));
  if (!in || in.gcount() != static_cast<std::streamsize>(table.values.size() * sizeof(u64)))
    throw cache_error(path + " is truncated");
  if (fnv1a64(table.values.data(), table.values.size() * sizeof(u64)) != h.checksum)
    throw cache_error(path + " failed its checksum; recompute the table");
  return table;
}

// Read and insist on matching parameters, so a stale cache for different
// (r, lo, hi) can never be silently substituted.
inline SrTable read_sr_cache_expect(const std::string& path, u64 r, u64 lo, u64 hi) {
  SrTable t = read_sr_cache(path);
  if (t.r != r || t.lo != lo || t.hi != hi)
    throw cache_error(path + " holds (r=" + std::to_string(t.r) + ", " + std::to_string(t.lo) +
                      ".." + std::to_string(t.hi) + "), wanted (r=" + std::to_string(r) + ", " +
                      std::to_string(lo) + ".." + std::to_string(hi) + ")");
  return t;
}

}  // namespace schemmel
