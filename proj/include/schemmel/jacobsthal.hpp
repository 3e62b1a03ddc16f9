#pragma once

#include <vector>

#include "arith.hpp"

namespace schemmel {

// Jacobsthal's function evaluated at the product of primes <= r: the
// largest gap between consecutive integers coprime to that product.
// Equivalently, j is minimal such that every window of j consecutive
// integers contains one.  witness_start is the smallest a >= 0 whose
// following j - 1 integers a+1, ..., a+j-1 all share a factor with the
// modulus (for j = 1 the window is empty and the witness is 0).
struct JacobsthalRecord {
  u64 r = 1;
  u64 modulus = 1;
  u64 j = 1;
  u64 witness_start = 0;
};

struct JacobsthalOptions {
  // The period scan holds one bit per residue; the product of primes <= 23
  // needs ~28 MB, <= 29 would need ~810 MB.
  std::size_t max_period_bytes = std::size_t{256} << 20;
};

inline JacobsthalRecord jacobsthal_of_primorial(PrimeTable& pt, u64 r,
                                                const JacobsthalOptions& opt = {}) {
  const u64 modulus = primorial(pt, r);  // overflows 64 bits for r >= 53
  if (modulus == 1) return {r, 1, 1, 0};
  if (modulus / 8 + 1 > opt.max_period_bytes)
    throw std::length_error("period scan over the primorial exceeds the memory budget");

  std::vector<bool> coprime(static_cast<std::size_t>(modulus), true);
  for (u64 p : pt.primes()) {
    if (p > r) break;
    for (u64 m = 0; m < modulus; m += p) coprime[static_cast<std::size_t>(m)] = false;
  }

  // One full period covers every gap: residues 1 and modulus + 1 are both
  // coprime, so scanning [1, modulus + 1] closes the cycle.  Keeping only
  // the first gap of each size makes the witness the smallest one.
  u64 max_gap = 1;
  u64 witness = 0;
  u64 prev = 1;
  for (u64 i = 2; i < modulus; ++i) {
    if (!coprime[static_cast<std::size_t>(i)]) continue;
    if (i - prev > max_gap) {
      max_gap = i - prev;
      witness = prev;
    }
    prev = i;
  }
  if (modulus + 1 - prev > max_gap) {
    max_gap = modulus + 1 - prev;
    witness = prev;
  }
  return {r, modulus, max_gap, witness};
}

}  // namespace schemmel
