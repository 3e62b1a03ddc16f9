#pragma once

#include <limits>
#include <string>
#include <vector>

#include "arith.hpp"

namespace schemmel {

// Enumeration could not be completed below the configured horizon cap.
// `undecided` lists the candidates whose status the scan couldn't settle.
struct inconclusive_error : std::runtime_error {
  u64 r;
  u64 horizon_cap;
  std::vector<u64> undecided;

  inconclusive_error(u64 r_, u64 cap, std::vector<u64> und)
      : std::runtime_error(describe(r_, cap, und)),
        r(r_),
        horizon_cap(cap),
        undecided(std::move(und)) {}

 private:
  static std::string describe(u64 r, u64 cap, const std::vector<u64>& und) {
    std::string msg = "enumeration inconclusive below horizon cap " + std::to_string(cap) +
                      " (r = " + std::to_string(r) + ")";
    if (!und.empty()) {
      msg += "; undecided candidates:";
      for (u64 n : und) msg += " " + std::to_string(n);
    }
    return msg;
  }
};

// Certified lower bound on S_r(m) for every m > horizon whose prime
// factors all exceed r.  `t` is the highest prime index entering the
// interval products (see docs/tail-bound.md for the derivation and proof).
struct TailBound {
  u64 r = 1;
  u64 horizon = 0;
  u64 t = 0;
  u64 bound = 0;
};

// T(Y) = min( floor(Y * prod(p_i - r) / prod(p_i)),  prod(p_i - r) * (p_{t+1} - r) )
// with both products over i = b+1 .. t, where b is the index of the largest
// prime <= r and t is maximal with prod_{i=b+1..t} p_i <= Y.  Exact integer
// arithmetic throughout; the quotient is floored.
inline TailBound tail_lower_bound(PrimeTable& pt, u64 horizon, u64 r) {
  const u64 b = base_index(pt, r);
  if (horizon < pt.nth(b + 1))
    throw std::invalid_argument("horizon below the smallest admissible prime");

  u64 t = b + 1;
  u64 d = pt.nth(t);
  for (;;) {
    u64 p = pt.nth(t + 1);
    if (detail::u128{d} * p > horizon) break;
    d *= p;
    ++t;
  }
  u64 pr = 1;  // prod (p_i - r) < d <= horizon, so it fits
  for (u64 i = b + 1; i <= t; ++i) pr *= pt.nth(i) - r;

  const u64 scaled = static_cast<u64>(detail::u128{horizon} * pr / d);
  const detail::u128 next = detail::u128{pr} * (pt.nth(t + 1) - r);
  return {r, horizon, t, next < scaled ? static_cast<u64>(next) : scaled};
}

// One certified member: n with its totient value and factorization, plus
// the horizon that was scanned to establish minimality.
struct FrRecord {
  u64 n = 1;
  u64 s_r = 1;
  FactoredInteger factors;
  u64 horizon = 0;
};

struct EnumerationCertificate {
  u64 r = 1;
  u64 upto = 0;
  u64 horizon = 0;   // every candidate was compared against all of [1, horizon]
  TailBound tail;    // covers everything beyond the horizon
  std::vector<FrRecord> members;  // increasing n
};

struct EnumerateOptions {
  SieveOptions sieve{};
  u64 horizon_cap = 10'000'000'000ull;
};

namespace detail {

// Smallest product p_{b+1} * ... * p_t that exceeds x (t > b minimal).
inline u64 interval_boundary_above(PrimeTable& pt, u64 r, u64 x) {
  const u64 b = base_index(pt, r);
  u128 d = 1;
  for (u64 t = b + 1;; ++t) {
    d = checked_mul128(d, pt.nth(t));
    if (d > x) return narrow_u64(d);
  }
}

// Backward scan over [1, Y] keeping the running minimum of S_r on the
// suffix.  A value n <= upto in the class is:
//   - accepted when S_r(n) beats both the suffix minimum and the tail bound,
//   - undecided when it beats the suffix minimum but not the tail bound.
// found comes out in decreasing n, undecided in decreasing n.
struct SuffixScan {
  std::vector<std::pair<u64, u64>> found;  // (n, s_r)
  std::vector<u64> undecided;
  u64 suffix_min = std::numeric_limits<u64>::max();

  void consume(u64 a, std::span<const u64> val, std::size_t len, u64 upto, u64 tail) {
    for (std::size_t i = len; i-- > 0;) {
      const u64 s = val[i];
      if (s == 0) continue;
      const u64 n = a + i;
      if (n <= upto && s < suffix_min) {
        if (s < tail)
          found.emplace_back(n, s);
        else
          undecided.push_back(n);
      }
      if (s < suffix_min) suffix_min = s;
    }
  }
};

// Sieve [1, Y] in segments, high to low, feeding each into the suffix scan.
// Segments are sieved in parallel batches but always consumed in strictly
// decreasing order, so the result is independent of the thread count.
inline SuffixScan scan_horizon(PrimeTable& pt, u64 r, u64 upto, u64 horizon, u64 tail,
                               const SieveOptions& opt) {
  pt.reserve_limit(isqrt(horizon));
  const std::span<const u64> primes = pt.primes();
  const u64 seg = std::max<u64>(opt.segment_entries, 1024);
  const std::size_t nseg = static_cast<std::size_t>((horizon + seg - 1) / seg);
  const unsigned batch = std::max(1u, opt.threads);

  SuffixScan scan;
  std::vector<std::vector<u64>> vals(batch), rems(batch);
  for (auto& v : vals) v.resize(static_cast<std::size_t>(seg));
  for (auto& v : rems) v.resize(static_cast<std::size_t>(seg));

  std::size_t remaining = nseg;
  while (remaining > 0) {
    const std::size_t cnt = std::min<std::size_t>(batch, remaining);
    const std::size_t first = remaining - cnt;  // segments [first, remaining)
    for_each_segment(cnt, opt.threads, [&](std::size_t k, unsigned) {
      const std::size_t si = first + k;
      const u64 a = static_cast<u64>(si) * seg + 1;
      const u64 b = std::min(horizon, (static_cast<u64>(si) + 1) * seg);
      const std::size_t len = static_cast<std::size_t>(b - a + 1);
      sieve_sr_segment(primes, a, b, r, std::span<u64>(vals[k]).first(len),
                       std::span<u64>(rems[k]).first(len));
    });
    for (std::size_t k = cnt; k-- > 0;) {
      const std::size_t si = first + k;
      const u64 a = static_cast<u64>(si) * seg + 1;
      const u64 b = std::min(horizon, (static_cast<u64>(si) + 1) * seg);
      scan.consume(a, vals[k], static_cast<std::size_t>(b - a + 1), upto, tail);
    }
    remaining = first;
  }
  return scan;
}

}  // namespace detail

// All n <= upto whose totient value is strictly below S_r(m) for every
// larger m in the coprimality class ("sparse" values of S_r).  The scan
// compares candidates against everything up to a horizon Y and closes the
// tail m > Y with the certified bound; if a candidate cannot be settled
// below the horizon cap, throws inconclusive_error.
inline EnumerationCertificate enumerate_sparsely(PrimeTable& pt, u64 r, u64 upto,
                                                 const EnumerateOptions& opt = {}) {
  if (r < 1 || upto < 1) throw std::invalid_argument("need r >= 1 and upto >= 1");

  // Start at the larger of 2 * upto and the first interval boundary past
  // upto: that keeps the tail bound's first branch from being starved.
  u64 horizon = std::max(checked_mul(upto, 2), detail::interval_boundary_above(pt, r, upto));
  if (horizon > opt.horizon_cap) throw inconclusive_error(r, opt.horizon_cap, {});

  for (;;) {
    const TailBound tail = tail_lower_bound(pt, horizon, r);
    detail::SuffixScan scan = detail::scan_horizon(pt, r, upto, horizon, tail.bound, opt.sieve);
    if (scan.undecided.empty()) {
      EnumerationCertificate cert{r, upto, horizon, tail, {}};
      cert.members.reserve(scan.found.size());
      for (auto it = scan.found.rbegin(); it != scan.found.rend(); ++it) {
        FrRecord rec{it->first, it->second, factorize(pt, it->first), horizon};
        cert.members.push_back(std::move(rec));
      }
      return cert;
    }
    // Grow: to the interval boundary two steps out, capped at doubling.
    const u64 doubled = checked_mul(horizon, 2);
    const detail::u128 two_out =
        detail::u128{detail::interval_boundary_above(pt, r, horizon)} * pt.nth(tail.t + 2);
    const u64 grown = two_out < detail::u128{doubled} ? static_cast<u64>(two_out) : doubled;
    if (grown <= horizon || grown > opt.horizon_cap) {
      std::vector<u64> undecided(scan.undecided.rbegin(), scan.undecided.rend());
      throw inconclusive_error(r, opt.horizon_cap, std::move(undecided));
    }
    horizon = grown;
  }
}

// Outcome of a single membership query.
struct MembershipResult {
  enum class Reason { none, outside_class, refuted };

  bool member = false;
  Reason reason = Reason::none;
  std::optional<FrRecord> record;  // set when member
  std::optional<u64> refuter;      // smallest larger m with S_r(m) <= S_r(n)
};

namespace detail {

// Smallest horizon Y at which the tail bound exceeds s, i.e. certifies
// that nothing past Y can attain a value <= s.  Walks the interval
// structure analytically instead of searching.  Returns cap + 1 if no
// Y <= cap works.
inline u64 horizon_for_value(PrimeTable& pt, u64 r, u64 s, u64 cap) {
  const u64 b = base_index(pt, r);
  u64 t = b + 1;
  u64 d = pt.nth(t);        // prod p_i over i in (b, t]
  u64 pr = pt.nth(t) - r;   // prod (p_i - r) over the same range
  for (;;) {
    const u64 p_next = pt.nth(t + 1);
    // Inside [d, d * p_next) the bound is min(floor(Y * pr / d), pr * (p_next - r)).
    if (u128{pr} * (p_next - r) > s) {
      const u128 need = (u128{s} + 1) * d;  // smallest Y with Y * pr >= (s + 1) * d
      const u64 y = narrow_u64((need + pr - 1) / pr);
      if (u128{y} < u128{d} * p_next) return std::max(y, d);
    }
    if (u128{d} * p_next > cap) return cap == std::numeric_limits<u64>::max() ? cap : cap + 1;
    d *= p_next;
    pr = checked_mul(pr, p_next - r);
    ++t;
  }
}

}  // namespace detail

// Decide whether n's totient value is strictly smaller than that of every
// larger member of the coprimality class.  Refutations come with the
// smallest refuting m; confirmations carry the scanned horizon.
inline MembershipResult is_sparsely(PrimeTable& pt, u64 n, u64 r,
                                    const EnumerateOptions& opt = {}) {
  if (n < 1 || r < 1) throw std::invalid_argument("need n >= 1 and r >= 1");
  if (!in_coprimality_class(pt, n, r))
    return {false, MembershipResult::Reason::outside_class, std::nullopt, std::nullopt};

  const FactoredInteger f = factorize(pt, n);
  const u64 s = schemmel_from_factors(f, r);
  u64 horizon = detail::horizon_for_value(pt, r, s, opt.horizon_cap);
  if (horizon > opt.horizon_cap) throw inconclusive_error(r, opt.horizon_cap, {n});
  horizon = std::max(horizon, n);

  // Scan (n, horizon] for the smallest m in the class with S_r(m) <= s.
  pt.reserve_limit(isqrt(horizon));
  const std::span<const u64> primes = pt.primes();
  const u64 seg = std::max<u64>(opt.sieve.segment_entries, 1024);
  std::vector<u64> val(static_cast<std::size_t>(seg)), rem(static_cast<std::size_t>(seg));
  for (u64 a = n + 1; a <= horizon; a += seg) {
    const u64 b = std::min(horizon, a + seg - 1);
    const std::size_t len = static_cast<std::size_t>(b - a + 1);
    detail::sieve_sr_segment(primes, a, b, r, std::span<u64>(val).first(len),
                             std::span<u64>(rem).first(len));
    for (std::size_t i = 0; i < len; ++i)
      if (val[i] != 0 && val[i] <= s)
        return {false, MembershipResult::Reason::refuted, std::nullopt, a + i};
  }
  return {true, MembershipResult::Reason::none, FrRecord{n, s, f, horizon}, std::nullopt};
}

// Result of replaying a certificate from scratch.
struct ReplayResult {
  bool ok = true;
  std::string detail;  // first discrepancy, empty when ok
};

// Re-derives the tail bound at the certificate's horizon, re-runs the full
// suffix scan, and checks the member list matches record for record (with
// internally consistent factorizations and values).
inline ReplayResult replay_certificate(PrimeTable& pt, const EnumerationCertificate& cert,
                                       const SieveOptions& opt = {}) {
  auto fail = [](std::string why) { return ReplayResult{false, std::move(why)}; };
  if (cert.r < 1 || cert.upto < 1 || cert.horizon < checked_mul(cert.upto, 2))
    return fail("malformed certificate header");

  const TailBound tail = tail_lower_bound(pt, cert.horizon, cert.r);
  if (tail.bound != cert.tail.bound || tail.t != cert.tail.t)
    return fail("tail bound mismatch at horizon " + std::to_string(cert.horizon));

  detail::SuffixScan scan =
      detail::scan_horizon(pt, cert.r, cert.upto, cert.horizon, tail.bound, opt);
  if (!scan.undecided.empty())
    return fail("scan left " + std::to_string(scan.undecided.size()) +
                " candidates undecided at the recorded horizon");
  if (scan.found.size() != cert.members.size())
    return fail("member count mismatch: replay found " + std::to_string(scan.found.size()) +
                ", certificate lists " + std::to_string(cert.members.size()));

  for (std::size_t i = 0; i < cert.members.size(); ++i) {
    const FrRecord& rec = cert.members[i];
    const auto& [n, s] = scan.found[scan.found.size() - 1 - i];  // found is decreasing
    if (rec.n != n || rec.s_r != s)
      return fail("member " + std::to_string(i) + " mismatch: replay (" + std::to_string(n) +
                  ", " + std::to_string(s) + ") vs record (" + std::to_string(rec.n) + ", " +
                  std::to_string(rec.s_r) + ")");
    u64 prod = 1;
    for (const auto& [p, e] : rec.factors.factors) prod = checked_mul(prod, checked_pow(p, e));
    if (prod != rec.n || rec.factors.n != rec.n)
      return fail("record " + std::to_string(rec.n) + " carries an inconsistent factorization");
    if (schemmel_from_factors(rec.factors, cert.r) != rec.s_r)
      return fail("record " + std::to_string(rec.n) + " carries an inconsistent totient value");
    if (!(rec.s_r < tail.bound))
      return fail("record " + std::to_string(rec.n) + " is not below the tail bound");
  }
  return {};
}

}  // namespace schemmel
