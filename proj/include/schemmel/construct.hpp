#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "arith.hpp"

namespace schemmel {

// Parameters of the product construction
//   n = d * p_{k+ell} * prod_{i=b+1}^{k-1} p_i
// where b is the index of the largest prime <= r.  Valid parameters
// satisfy four conditions:
//   1. k >= b + 2
//   2. every prime factor of d exceeds r
//   3. d < p_{k+1} - r
//   4. d * (p_{k+ell} - r) < (d + 1) * (p_k - r)
// Under these, n is guaranteed to carry a sparse totient value.
struct ConstructionParams {
  u64 r = 1;
  u64 k = 2;
  u64 ell = 0;
  u64 d = 1;
};

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> violations;
};

inline ValidationReport validate_params(PrimeTable& pt, const ConstructionParams& c) {
  if (c.r < 1 || c.k < 1 || c.d < 1)
    throw std::invalid_argument("need r >= 1, k >= 1, d >= 1");
  ValidationReport rep;
  auto flag = [&](std::string why) {
    rep.valid = false;
    rep.violations.push_back(std::move(why));
  };

  const u64 b = base_index(pt, c.r);
  if (c.k < b + 2)
    flag("k = " + std::to_string(c.k) + " is below b + 2 = " + std::to_string(b + 2));
  if (!in_coprimality_class(pt, c.d, c.r))
    flag("d = " + std::to_string(c.d) + " has a prime factor <= r = " + std::to_string(c.r));
  const u64 pk1 = pt.nth(c.k + 1);
  if (!(c.d < pk1 - c.r))
    flag("d = " + std::to_string(c.d) + " is not below p_{k+1} - r = " + std::to_string(pk1 - c.r));
  const u64 top = pt.nth(c.k + c.ell);
  const u64 pk = pt.nth(c.k);
  if (top <= c.r || pk <= c.r) {
    flag("chosen primes do not exceed r");  // only reachable when k <= b
  } else if (!(detail::u128{c.d} * (top - c.r) < detail::u128{c.d + 1} * (pk - c.r))) {
    flag("d (p_{k+ell} - r) = " + std::to_string(c.d) + " * " + std::to_string(top - c.r) +
         " is not below (d+1) (p_k - r) = " + std::to_string(c.d + 1) + " * " +
         std::to_string(pk - c.r));
  }
  return rep;
}

// Evaluate the construction for valid parameters.  The bound conditions
// force the result's totient value below that of every larger integer in
// the coprimality class, so this generates members with no search.
inline FactoredInteger build_member(PrimeTable& pt, const ConstructionParams& c) {
  const ValidationReport rep = validate_params(pt, c);
  if (!rep.valid) {
    std::string msg = "invalid construction parameters:";
    for (const auto& v : rep.violations) msg += " [" + v + "]";
    throw std::invalid_argument(msg);
  }
  const u64 b = base_index(pt, c.r);
  u64 n = c.d;
  for (u64 i = b + 1; i + 1 <= c.k; ++i) n = checked_mul(n, pt.nth(i));
  n = checked_mul(n, pt.nth(c.k + c.ell));
  return factorize(pt, n);
}

// One member of the maximal-offset family: for each k, the largest ell
// with p_{k+ell} < 2 p_k - r (condition 4 at d = 1).  log_n is the natural
// log of the member; n_exact is present only while the product fits 64 bits.
struct FamilyEntry {
  u64 k = 0;
  u64 ell = 0;
  u64 top_prime = 0;  // p_{k+ell}, the largest prime factor of the member
  double log_n = 0;
  std::optional<u64> n_exact;
};

// The family for k = b + 2 .. k_max, one entry per k, with the maximal
// admissible offset.  Bertrand's postulate guarantees the offset exists;
// the sanity check below asserts the defining sandwich
// p_{k+ell} < 2 p_k - r <= p_{k+ell+1}.
inline std::vector<FamilyEntry> doubling_family(PrimeTable& pt, u64 r, u64 k_max) {
  if (r < 1) throw std::invalid_argument("order r must be >= 1");
  const u64 b = base_index(pt, r);
  std::vector<FamilyEntry> out;
  if (k_max < b + 2) return out;
  pt.reserve_count(static_cast<std::size_t>(2 * k_max + 8));

  double log_base = 0;    // log prod_{i=b+1}^{k-1} p_i
  detail::u128 base = 1;  // the same product, while it fits
  bool base_fits = true;
  for (u64 k = b + 2; k <= k_max; ++k) {
    const u64 joined = pt.nth(k - 1);  // newly absorbed into the base product
    log_base += std::log(static_cast<double>(joined));
    if (base_fits && base <= ~detail::u128{0} / joined)
      base *= joined;
    else
      base_fits = false;

    const u64 bound = 2 * pt.nth(k) - r;
    u64 ell = 0;
    while (pt.nth(k + ell + 1) < bound) ++ell;
    if (!(pt.nth(k + ell) < bound && bound <= pt.nth(k + ell + 1)))
      throw std::logic_error("maximal offset violates its defining sandwich");

    FamilyEntry e;
    e.k = k;
    e.ell = ell;
    e.top_prime = pt.nth(k + ell);
    e.log_n = log_base + std::log(static_cast<double>(e.top_prime));
    if (base_fits && base <= ~detail::u128{0} / e.top_prime) {
      const detail::u128 n = base * e.top_prime;
      if (n <= detail::u128{~u64{0}}) e.n_exact = static_cast<u64>(n);
    }
    out.push_back(e);
  }
  return out;
}

// A real-variable comparison instance: factor lists x, y and scalars X, Y
// with r < x_i <= y_i for all i, Y >= max(x_i), and X prod x_i < Y prod y_i.
// Under these hypotheses, shifting every factor down by r preserves the
// strict ordering of the products.
struct ShiftedProductInstance {
  u64 r = 1;
  std::vector<double> x;
  std::vector<double> y;
  double big_x = 0;
  double big_y = 0;
};

// Whether (X - r) prod (x_i - r) < (Y - r) prod (y_i - r).  Evaluated in
// floating point with a relative guard band of 1e-9, since the statement
// is over the reals; nothing in the certification paths depends on it.
// Instances violating the hypotheses are rejected with an exception,
// which is distinct from a false return.
inline bool check_shifted_product(const ShiftedProductInstance& in) {
  if (in.r < 1) throw std::invalid_argument("order r must be >= 1");
  if (in.x.empty() || in.x.size() != in.y.size())
    throw std::invalid_argument("factor lists must be nonempty and equally long");
  const double r = static_cast<double>(in.r);
  double px = 1, py = 1, max_x = 0;
  for (std::size_t i = 0; i < in.x.size(); ++i) {
    if (!(r < in.x[i] && in.x[i] <= in.y[i]))
      throw std::invalid_argument("need r < x_i <= y_i for every factor");
    px *= in.x[i];
    py *= in.y[i];
    max_x = std::max(max_x, in.x[i]);
  }
  if (!(in.big_y >= max_x)) throw std::invalid_argument("need Y >= max(x_i)");
  if (!(in.big_x * px < in.big_y * py))
    throw std::invalid_argument("need X prod(x_i) < Y prod(y_i)");

  double lhs = in.big_x - r, rhs = in.big_y - r;
  for (std::size_t i = 0; i < in.x.size(); ++i) {
    lhs *= in.x[i] - r;
    rhs *= in.y[i] - r;
  }
  const double guard = 1e-9 * std::max(std::abs(lhs), std::abs(rhs));
  return lhs < rhs + guard;
}

}  // namespace schemmel
