#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "checked.hpp"

namespace schemmel {

// Growable table of primes p_1 = 2, p_2 = 3, p_3 = 5, ... backed by a
// segmented Eratosthenes sieve.  The table extends itself on demand; once a
// range has been reserved, lookups within it never mutate and are cheap.
// Indices are 1-based throughout, matching the usual p_i convention.
class PrimeTable {
 public:
  // Hard ceiling on how far the table may grow.  pi(10^9) primes occupy
  // ~400 MB; anything past that is treated as resource exhaustion rather
  // than silently eating the machine.
  static constexpr u64 kMaxLimit = 1'000'000'000;

  u64 nth(std::size_t i) {
    if (i == 0) throw std::invalid_argument("prime indices are 1-based");
    reserve_count(i);
    return primes_[i - 1];
  }

  // 1-based index of p in the sequence of primes, or nullopt if composite.
  std::optional<std::size_t> index_of(u64 p) {
    if (p < 2) return std::nullopt;
    reserve_limit(p);
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p) return std::nullopt;
    return static_cast<std::size_t>(it - primes_.begin()) + 1;
  }

  // pi(n): number of primes <= n.
  std::size_t count_upto(u64 n) {
    if (n < 2) return 0;
    reserve_limit(n);
    return static_cast<std::size_t>(
        std::upper_bound(primes_.begin(), primes_.end(), n) - primes_.begin());
  }

  bool is_prime(u64 n) {
    if (n < 2) return false;
    if (n <= limit_) return std::binary_search(primes_.begin(), primes_.end(), n);
    u64 s = isqrt(n);
    reserve_limit(s);
    for (u64 p : primes_) {
      if (p > s) break;
      if (n % p == 0) return false;
    }
    return true;
  }

  // Make sure every prime <= n is present.
  void reserve_limit(u64 n) {
    if (n <= limit_) return;
    if (n > kMaxLimit)
      throw std::length_error("prime table limit exceeded: cannot sieve past 10^9");
    grow_to(n);
  }

  // Make sure at least k primes are present.
  void reserve_count(std::size_t k) {
    while (primes_.size() < k) {
      u64 target;
      if (k < 6) {
        target = 16;
      } else {
        // p_k < k (ln k + ln ln k) for k >= 6
        double kk = static_cast<double>(k);
        target = static_cast<u64>(kk * (std::log(kk) + std::log(std::log(kk)))) + 16;
      }
      if (target <= limit_) target = limit_ + limit_ / 2 + 16;
      reserve_limit(target);
    }
  }

  // View of all primes sieved so far, increasing.
  std::span<const u64> primes() const { return primes_; }

  // Everything up to and including this bound has been sieved.
  u64 limit() const { return limit_; }

 private:
  std::vector<u64> primes_;
  u64 limit_ = 1;

  void bootstrap() {
    constexpr u64 kFirst = 1024;
    std::vector<bool> comp(kFirst + 1, false);
    for (u64 i = 2; i * i <= kFirst; ++i)
      if (!comp[i])
        for (u64 j = i * i; j <= kFirst; j += i) comp[j] = true;
    for (u64 i = 2; i <= kFirst; ++i)
      if (!comp[i]) primes_.push_back(i);
    limit_ = kFirst;
  }

  void grow_to(u64 n) {
    if (primes_.empty()) bootstrap();
    while (limit_ < n) {
      // Doubling keeps isqrt(next) <= limit_, so the base primes needed to
      // sieve (limit_, next] are always already present.
      u64 next = std::min(n, limit_ * 2);
      if (next <= limit_) next = limit_ + 1;
      append_range(limit_ + 1, next);
      limit_ = next;
    }
  }

  void append_range(u64 lo, u64 hi) {
    constexpr u64 kChunk = u64{1} << 24;
    std::vector<bool> comp;
    for (u64 a = lo; a <= hi;) {
      u64 b = std::min(hi, a + kChunk - 1);
      comp.assign(static_cast<std::size_t>(b - a + 1), false);
      for (u64 p : primes_) {
        if (p * p > b) break;
        u64 start = std::max(p * p, ((a + p - 1) / p) * p);
        for (u64 m = start; m <= b; m += p) comp[static_cast<std::size_t>(m - a)] = true;
      }
      for (u64 i = 0; i <= b - a; ++i)
        if (!comp[static_cast<std::size_t>(i)]) primes_.push_back(a + i);
      a = b + 1;
    }
  }
};

}  // namespace schemmel
