#pragma once

#include <atomic>
#include <numeric>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "checked.hpp"
#include "primes.hpp"

namespace schemmel {

struct PrimeFactor {
  u64 p;
  u32 exp;
  friend bool operator==(const PrimeFactor&, const PrimeFactor&) = default;
};

// A positive integer together with its full prime factorization,
// factors sorted by increasing prime.
struct FactoredInteger {
  u64 n = 1;
  std::vector<PrimeFactor> factors;

  std::size_t omega() const { return factors.size(); }

  // smallest prime factor; nullopt for n = 1
  std::optional<u64> spf() const {
    if (factors.empty()) return std::nullopt;
    return factors.front().p;
  }

  u32 exponent_of(u64 p) const {
    for (const auto& f : factors)
      if (f.p == p) return f.exp;
    return 0;
  }

  u64 radical() const {
    u64 v = 1;
    for (const auto& f : factors) v *= f.p;
    return v;
  }

  friend bool operator==(const FactoredInteger&, const FactoredInteger&) = default;
};

inline u64 nth_prime(PrimeTable& pt, std::size_t i) { return pt.nth(i); }

// Index of the largest prime <= r (0 when r = 1, since no prime is <= 1).
inline u64 base_index(PrimeTable& pt, u64 r) {
  if (r < 1) throw std::invalid_argument("order r must be >= 1");
  return pt.count_upto(r);
}

// Product of all primes <= x.  Throws std::overflow_error once the product
// leaves 64 bits (first happens at x = 53).
inline u64 primorial(PrimeTable& pt, u64 x) {
  pt.reserve_limit(std::max<u64>(x, 2));
  u64 v = 1;
  for (u64 p : pt.primes()) {
    if (p > x) break;
    v = checked_mul(v, p);
  }
  return v;
}

inline FactoredInteger factorize(PrimeTable& pt, u64 n) {
  if (n == 0) throw std::invalid_argument("factorize requires n >= 1");
  FactoredInteger f;
  f.n = n;
  u64 m = n;
  pt.reserve_limit(isqrt(n));
  for (u64 p : pt.primes()) {
    if (p * p > m) break;
    if (m % p == 0) {
      u32 e = 0;
      do {
        m /= p;
        ++e;
      } while (m % p == 0);
      f.factors.push_back({p, e});
    }
  }
  if (m > 1) f.factors.push_back({m, 1});
  return f;
}

// True iff every prime factor of n exceeds r (vacuously true for n = 1).
// These are exactly the integers coprime to the product of primes <= r.
inline bool in_coprimality_class(PrimeTable& pt, u64 n, u64 r) {
  if (n == 0 || r == 0) throw std::invalid_argument("need n >= 1 and r >= 1");
  if (n == 1) return true;
  pt.reserve_limit(r);
  for (u64 p : pt.primes()) {
    if (p > r) break;
    if (n % p == 0) return false;
  }
  return true;
}

// S_r(n) from a known factorization: product of p^(a-1) (p - r) over the
// prime powers p^a dividing n exactly, and 0 as soon as some p <= r.
inline u64 schemmel_from_factors(const FactoredInteger& f, u64 r) {
  if (r < 1) throw std::invalid_argument("order r must be >= 1");
  u64 v = 1;
  for (const auto& [p, e] : f.factors) {
    if (p <= r) return 0;
    v = checked_mul(v, checked_mul(checked_pow(p, e - 1), p - r));
  }
  return v;
}

// S_r(n), the r-th order totient.  S_1 is Euler's phi.
inline u64 schemmel(PrimeTable& pt, u64 n, u64 r) {
  if (n == 0) throw std::invalid_argument("schemmel requires n >= 1");
  if (n == 1) return 1;
  return schemmel_from_factors(factorize(pt, n), r);
}

// Literal counting form: how many k in [1, n] have gcd(k + j, n) = 1 for
// every j in [0, r).  Quadratic; reference/testing use only.
inline u64 schemmel_by_count(u64 n, u64 r) {
  if (n == 0 || r == 0) throw std::invalid_argument("need n >= 1 and r >= 1");
  u64 count = 0;
  for (u64 k = 1; k <= n; ++k) {
    bool ok = true;
    for (u64 j = 0; j < r && ok; ++j) ok = std::gcd(k + j, n) == 1;
    count += ok;
  }
  return count;
}

// Dense table of S_r over a contiguous range.  values[n - lo] = S_r(n);
// a zero marks n outside the coprimality class.
struct SrTable {
  u64 r = 1;
  u64 lo = 1;
  u64 hi = 1;
  std::vector<u64> values;

  u64 at(u64 n) const {
    if (n < lo || n > hi) throw std::out_of_range("n outside the tabulated range");
    return values[static_cast<std::size_t>(n - lo)];
  }
};

struct SieveOptions {
  std::size_t segment_entries = std::size_t{1} << 22;
  unsigned threads = 1;
  // Refuse to build one monolithic table past this size; callers wanting
  // more should walk segments themselves.
  std::size_t max_table_entries = std::size_t{1} << 26;
};

namespace detail {

// Fill val[i] = S_r(lo + i) for the whole segment by striding each sieving
// prime once.  rem is scratch of the same length; primes must cover
// isqrt(hi).  No allocation, no overflow: every partial product divides its
// n, so everything stays below hi.
inline void sieve_sr_segment(std::span<const u64> primes, u64 lo, u64 hi, u64 r,
                             std::span<u64> val, std::span<u64> rem) {
  const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
  for (std::size_t i = 0; i < len; ++i) {
    rem[i] = lo + i;
    val[i] = 1;
  }
  for (u64 p : primes) {
    if (p * p > hi) break;
    for (u64 m = ((lo + p - 1) / p) * p; m <= hi; m += p) {
      auto i = static_cast<std::size_t>(m - lo);
      u32 e = 0;
      do {
        rem[i] /= p;
        ++e;
      } while (rem[i] % p == 0);
      if (p <= r) {
        val[i] = 0;
      } else {
        u64 f = p - r;
        while (--e) f *= p;
        val[i] *= f;
      }
    }
  }
  for (std::size_t i = 0; i < len; ++i) {
    u64 q = rem[i];  // leftover prime > sqrt(hi), or 1
    if (q > 1) val[i] = q <= r ? 0 : val[i] * (q - r);
  }
  if (lo == 1) val[0] = 1;  // S_r(1) = 1 by convention (empty product)
}

// How many workers for_each_segment will actually use.
inline unsigned worker_count(std::size_t nseg, unsigned threads) {
  if (threads <= 1 || nseg <= 1) return 1;
  return static_cast<unsigned>(std::min<std::size_t>(threads, nseg));
}

// Run fn(segment_index, worker_id) over [0, nseg) on the requested number
// of threads.  Work is handed out through a shared counter; fn must
// tolerate any interleaving across distinct indices.
template <typename Fn>
inline void for_each_segment(std::size_t nseg, unsigned threads, Fn&& fn) {
  unsigned n = worker_count(nseg, threads);
  if (n == 1) {
    for (std::size_t si = 0; si < nseg; ++si) fn(si, 0u);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t)
    pool.emplace_back([&, t] {
      for (;;) {
        std::size_t si = next.fetch_add(1, std::memory_order_relaxed);
        if (si >= nseg) break;
        fn(si, t);
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Tabulate S_r over [lo, hi].  Deterministic: the result is identical for
// every thread count.
inline SrTable sieve_sr_range(PrimeTable& pt, u64 lo, u64 hi, u64 r,
                              const SieveOptions& opt = {}) {
  if (r < 1) throw std::invalid_argument("order r must be >= 1");
  if (lo < 1 || lo > hi) throw std::invalid_argument("need 1 <= lo <= hi");
  const u64 len = hi - lo + 1;
  if (len > opt.max_table_entries)
    throw std::length_error("requested table exceeds the entry budget; sieve in segments");
  pt.reserve_limit(isqrt(hi));
  const std::span<const u64> primes = pt.primes();

  SrTable table{r, lo, hi, std::vector<u64>(static_cast<std::size_t>(len))};
  const std::size_t seg = std::max<std::size_t>(opt.segment_entries, 1024);
  const std::size_t nseg = static_cast<std::size_t>((len + seg - 1) / seg);

  std::vector<std::vector<u64>> scratch(detail::worker_count(nseg, opt.threads));
  detail::for_each_segment(nseg, opt.threads, [&](std::size_t si, unsigned w) {
    u64 a = lo + static_cast<u64>(si) * seg;
    u64 b = std::min(hi, a + seg - 1);
    std::size_t n = static_cast<std::size_t>(b - a + 1);
    scratch[w].resize(seg);
    detail::sieve_sr_segment(primes, a, b, r,
                             std::span<u64>(table.values).subspan(static_cast<std::size_t>(a - lo), n),
                             std::span<u64>(scratch[w]).first(n));
  });
  return table;
}

}  // namespace schemmel
