#pragma once

#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

#include "certify.hpp"
#include "construct.hpp"
#include "jacobsthal.hpp"

namespace schemmel {

// Prime-divisor profile of a member n of the coprimality class:
//   P[k-1] = k-th largest prime divisor of n,
//   Q[k-1] = k-th smallest prime that exceeds r and does not divide n,
//   R      = n divided by its radical,
//   eta    = multiplicity of the largest prime divisor.
struct PrimeProfile {
  u64 n = 2;
  u64 r = 1;
  std::vector<u64> P;
  std::vector<u64> Q;
  u64 R = 1;
  u32 eta = 1;
};

inline PrimeProfile profile(PrimeTable& pt, u64 n, u64 r, std::size_t q_depth) {
  if (n < 2) throw std::invalid_argument("profile requires n >= 2");
  if (!in_coprimality_class(pt, n, r))
    throw std::invalid_argument("profile requires every prime factor of n to exceed r");
  const FactoredInteger f = factorize(pt, n);

  PrimeProfile prof;
  prof.n = n;
  prof.r = r;
  for (auto it = f.factors.rbegin(); it != f.factors.rend(); ++it) prof.P.push_back(it->p);
  prof.eta = f.factors.back().exp;
  prof.R = n / f.radical();
  const u64 b = base_index(pt, r);
  for (u64 i = b + 1; prof.Q.size() < q_depth; ++i) {
    const u64 p = pt.nth(i);
    if (n % p != 0) prof.Q.push_back(p);
  }
  return prof;
}

// The unique positive root of A(x) = (J_r/r) x^k + k x - (k - 1), found by
// bisection on [0, 1]: A(0) < 0 < A(1) and A is strictly increasing.
struct LambdaRoot {
  u64 k = 2;
  u64 r = 1;
  u64 jacobsthal = 1;
  double value = 0;
  double residual = 0;
};

inline LambdaRoot lambda_root_given(u64 k, u64 r, u64 jr) {
  if (k < 2) throw std::invalid_argument("the root is defined for k >= 2");
  if (r < 1 || jr < 1) throw std::invalid_argument("need r >= 1 and a positive gap value");
  const double c = static_cast<double>(jr) / static_cast<double>(r);
  const double kd = static_cast<double>(k);
  auto a = [&](double x) {
    double xp = 1;
    for (u64 i = 0; i < k; ++i) xp *= x;
    return c * xp + kd * x - (kd - 1);
  };
  double lo = 0, hi = 1;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (a(mid) < 0 ? lo : hi) = mid;
  }
  const double value = 0.5 * (lo + hi);
  return {k, r, jr, value, a(value)};
}

inline LambdaRoot lambda_root(PrimeTable& pt, u64 k, u64 r) {
  return lambda_root_given(k, r, jacobsthal_of_primorial(pt, r).j);
}

// A prime p carries a sparse value iff r < p < this threshold.
inline u64 prime_membership_threshold(PrimeTable& pt, u64 r) {
  const u64 b = base_index(pt, r);
  const u64 q1 = pt.nth(b + 1), q2 = pt.nth(b + 2);
  return checked_add(checked_mul(q1 - r, q2 - r), r);
}

// Exact scan of the consecutive-prime ratio bound 5 p_{j+1} <= 7 p_j for
// every index j outside {1, 2, 4} with p_{j+1} <= limit.
struct PrimeRatioReport {
  u64 limit = 0;
  u64 pairs_checked = 0;
  struct Pair {
    u64 j, p_j, p_next;
  };
  std::vector<Pair> exceptions;  // the excluded indices, for the record
  std::vector<Pair> violations;
  bool passed() const { return violations.empty(); }
};

inline PrimeRatioReport verify_prime_ratio_bound(PrimeTable& pt, u64 limit) {
  PrimeRatioReport rep;
  rep.limit = limit;
  pt.reserve_limit(limit);
  const std::span<const u64> ps = pt.primes();
  for (std::size_t j = 1; j < ps.size() && ps[j] <= limit; ++j) {
    const PrimeRatioReport::Pair pair{j, ps[j - 1], ps[j]};
    if (j == 1 || j == 2 || j == 4) {
      rep.exceptions.push_back(pair);
      continue;
    }
    ++rep.pairs_checked;
    if (5 * pair.p_next > 7 * pair.p_j) rep.violations.push_back(pair);
  }
  return rep;
}

namespace detail {

// Exact decision of q / s > lambda, where lambda is the positive root of
// (jr/r) x^k + k x - (k - 1).  Since that polynomial is strictly
// increasing for x > 0, the comparison reduces to its sign at q / s;
// clearing denominators gives an integer test, so no tolerance is needed:
//   jr q^k + k r q s^(k-1)  >  (k - 1) r s^k.
inline bool separation_holds(u64 jr, u64 r, u64 k, u64 q, u64 s) {
  const u128 sk1 = checked_pow128(s, k - 1);
  const u128 lhs =
      checked_mul128(jr, checked_pow128(q, k)) +
      checked_mul128(checked_mul128(u128{k} * r, q), sk1);
  const u128 rhs = checked_mul128(checked_mul128(u128{k - 1} * r, s), sk1);
  return lhs > rhs;
}

}  // namespace detail

// Machine verification of the three divisor-bound inequalities on every
// member of a certificate:
//   separation:          Q_{k-1}(n) > lambda_k(r) (P_k(n) - r)   for 2 <= k <= omega(n)
//   largest prime bound: P_1(n) < Q_1(n) (1 - J_r + (J_r/r) Q_1(n))   for omega(n) >= 2
//   radical bound:       R(n) < (J_r/r) Q_1(n) (Q_1(n) - r)
// All three are decided in exact scaled integers (multiplied through by r).
struct DivisorBoundsReport {
  u64 r = 1;
  u64 jacobsthal = 1;
  u64 members_checked = 0;
  u64 inequalities_checked = 0;
  struct Violation {
    u64 n;
    std::string which;
  };
  std::vector<Violation> violations;
  bool passed() const { return violations.empty(); }
};

inline DivisorBoundsReport verify_divisor_bounds(PrimeTable& pt,
                                                 const EnumerationCertificate& cert) {
  DivisorBoundsReport rep;
  rep.r = cert.r;
  rep.jacobsthal = jacobsthal_of_primorial(pt, cert.r).j;
  const u64 r = cert.r;
  const u64 jr = rep.jacobsthal;
  const u64 b = base_index(pt, r);

  for (const FrRecord& m : cert.members) {
    ++rep.members_checked;
    auto flag = [&](std::string which) { rep.violations.push_back({m.n, std::move(which)}); };

    if (m.n == 1) {  // R(1) = 1 and Q_1(1) is the smallest prime > r
      const u64 q1 = pt.nth(b + 1);
      ++rep.inequalities_checked;
      if (!(detail::u128{r} < detail::u128{jr} * q1 * (q1 - r))) flag("radical bound");
      continue;
    }

    const std::size_t omega = m.factors.omega();
    const std::size_t depth = std::max<std::size_t>(omega >= 1 ? omega - 1 : 0, 1);
    const PrimeProfile prof = profile(pt, m.n, r, depth);
    const u64 q1 = prof.Q[0];

    ++rep.inequalities_checked;
    if (!(detail::u128{r} * prof.R < detail::u128{jr} * q1 * (q1 - r))) flag("radical bound");

    if (omega >= 2) {
      ++rep.inequalities_checked;
      if (!(detail::u128{r} * prof.P[0] < detail::u128{q1} * (detail::u128{jr} * (q1 - r) + r)))
        flag("largest prime bound");
      for (u64 k = 2; k <= omega; ++k) {
        ++rep.inequalities_checked;
        if (!detail::separation_holds(jr, r, k, prof.Q[k - 2], prof.P[k - 1] - r))
          flag("separation at k = " + std::to_string(k));
      }
    }
  }
  return rep;
}

// Structural facts about a certificate's member list:
//  (a) no member is the square of the smallest admissible prime, and no
//      member is the cube of any prime;
//  (b) the primes among the members are exactly those strictly between r
//      and the prime membership threshold;
//  (c) downward closure: p^(a-1) gamma is a member whenever p^a gamma is
//      (a >= 2, p not dividing gamma);
//  (d) members divisible by the fourth power of their largest prime factor
//      (finitely many exist; listed, not failed).
struct StructureReport {
  u64 r = 1;
  u64 upto = 0;
  u64 threshold = 0;
  u64 members_checked = 0;
  std::vector<u64> prime_members;
  std::vector<u64> expected_prime_members;
  struct Violation {
    u64 n;
    std::string what;
  };
  std::vector<Violation> violations;
  std::vector<u64> fourth_power_members;  // informational
  bool passed() const { return violations.empty() && prime_members == expected_prime_members; }
};

inline StructureReport verify_structure(PrimeTable& pt, const EnumerationCertificate& cert) {
  StructureReport rep;
  rep.r = cert.r;
  rep.upto = cert.upto;
  rep.threshold = prime_membership_threshold(pt, cert.r);
  const u64 first_admissible = pt.nth(base_index(pt, cert.r) + 1);

  std::unordered_set<u64> members;
  members.reserve(cert.members.size() * 2);
  for (const FrRecord& m : cert.members) members.insert(m.n);

  for (const FrRecord& m : cert.members) {
    ++rep.members_checked;
    const auto& fs = m.factors.factors;
    if (fs.size() == 1) {
      const auto& [p, e] = fs.front();
      if (e == 1) rep.prime_members.push_back(p);
      if (e == 2 && p == first_admissible)
        rep.violations.push_back({m.n, "square of the smallest admissible prime"});
      if (e == 3) rep.violations.push_back({m.n, "cube of a prime"});
    }
    for (const auto& [p, e] : fs)
      if (e >= 2 && !members.contains(m.n / p))
        rep.violations.push_back(
            {m.n, "quotient " + std::to_string(m.n / p) + " is missing from the member list"});
    if (!fs.empty() && fs.back().exp >= 4) rep.fourth_power_members.push_back(m.n);
  }

  pt.reserve_limit(std::min(cert.upto, rep.threshold));
  for (u64 p : pt.primes()) {
    if (p >= rep.threshold || p > cert.upto) break;
    if (p > cert.r) rep.expected_prime_members.push_back(p);
  }
  return rep;
}

// Conjecture counterexample scan: members that are squares of primes, and
// members divisible by the cube of their largest prime factor.  Empty
// lists are consistent with the conjectures; a non-empty list is a
// finding to report, not an error.
struct ConjectureScanReport {
  u64 r = 1;
  u64 upto = 0;
  u64 members_checked = 0;
  std::vector<u64> prime_squares;
  std::vector<u64> top_cube_members;
  bool clean() const { return prime_squares.empty() && top_cube_members.empty(); }
};

inline ConjectureScanReport scan_conjectures(const EnumerationCertificate& cert) {
  ConjectureScanReport rep;
  rep.r = cert.r;
  rep.upto = cert.upto;
  for (const FrRecord& m : cert.members) {
    ++rep.members_checked;
    const auto& fs = m.factors.factors;
    if (fs.size() == 1 && fs.front().exp == 2) rep.prime_squares.push_back(m.n);
    if (!fs.empty() && fs.back().exp >= 3) rep.top_cube_members.push_back(m.n);
  }
  return rep;
}

// One row of the asymptotic-ratio table.  For certificate members n is
// exact; for family entries it may be too large to materialize, in which
// case only log_n is meaningful.
struct RatioRow {
  std::optional<u64> n;
  double log_n = 0;
  u64 omega = 0;
  u64 p1 = 0;
  u64 q_l = 0;
  std::optional<u64> p_k;  // absent when K > omega
  double p1_over_log = 0;
  double ql_over_log = 0;
  std::optional<double> pk_over_log;
  double p1_over_log2 = 0;
};

// Ratio table with the two reference constants the rows are compared
// against: 1 / lambda_K(r) and J_r / r.
struct RatioReport {
  u64 r = 1;
  u64 K = 2;
  u64 L = 1;
  u64 jacobsthal = 1;
  double lambda_k = 0;
  double inv_lambda_k = 0;
  double jr_over_r = 0;
  std::vector<RatioRow> rows;
};

namespace detail {

inline RatioReport ratio_report_header(PrimeTable& pt, u64 r, u64 big_k, u64 big_l) {
  if (big_k < 2) throw std::invalid_argument("the separation index K must be >= 2");
  if (big_l < 1) throw std::invalid_argument("the gap index L must be >= 1");
  RatioReport rep;
  rep.r = r;
  rep.K = big_k;
  rep.L = big_l;
  rep.jacobsthal = jacobsthal_of_primorial(pt, r).j;
  const LambdaRoot lam = lambda_root_given(big_k, r, rep.jacobsthal);
  rep.lambda_k = lam.value;
  rep.inv_lambda_k = 1.0 / lam.value;
  rep.jr_over_r = static_cast<double>(rep.jacobsthal) / static_cast<double>(r);
  return rep;
}

inline void finish_row(RatioRow& row) {
  row.p1_over_log = static_cast<double>(row.p1) / row.log_n;
  row.ql_over_log = static_cast<double>(row.q_l) / row.log_n;
  if (row.p_k) row.pk_over_log = static_cast<double>(*row.p_k) / row.log_n;
  row.p1_over_log2 = static_cast<double>(row.p1) / (row.log_n * row.log_n);
}

}  // namespace detail

// Ratio table over certified members (n = 1 is skipped: log 1 = 0).
inline RatioReport ratio_report(PrimeTable& pt, const EnumerationCertificate& cert, u64 big_k,
                                u64 big_l) {
  RatioReport rep = detail::ratio_report_header(pt, cert.r, big_k, big_l);
  for (const FrRecord& m : cert.members) {
    if (m.n < 2) continue;
    const std::size_t omega = m.factors.omega();
    const std::size_t depth = std::max<std::size_t>(big_l, omega >= 1 ? omega - 1 : 1);
    const PrimeProfile prof = profile(pt, m.n, cert.r, depth);
    RatioRow row;
    row.n = m.n;
    row.log_n = std::log(static_cast<double>(m.n));
    row.omega = omega;
    row.p1 = prof.P.front();
    row.q_l = prof.Q[big_l - 1];
    if (big_k <= omega) row.p_k = prof.P[big_k - 1];
    detail::finish_row(row);
    rep.rows.push_back(row);
  }
  return rep;
}

// Ratio table along the maximal-offset family.  The profile is implicit
// in the construction: the member for index k is p_{k+ell} times the
// block p_{b+1} ... p_{k-1}, so every P and Q entry is a direct prime
// table lookup and no big integer is ever formed.
inline RatioReport ratio_report(PrimeTable& pt, const std::vector<FamilyEntry>& family, u64 r,
                                u64 big_k, u64 big_l) {
  RatioReport rep = detail::ratio_report_header(pt, r, big_k, big_l);
  const u64 b = base_index(pt, r);
  for (const FamilyEntry& e : family) {
    RatioRow row;
    row.n = e.n_exact;
    row.log_n = e.log_n;
    row.omega = e.k - b;  // the block has k-1-b primes, plus the top prime
    row.p1 = e.top_prime;
    // Q skips over the top prime: p_k, ..., p_{k+ell-1}, then p_{k+ell+1}, ...
    row.q_l = big_l <= e.ell ? pt.nth(e.k + big_l - 1) : pt.nth(e.k + big_l);
    // P descends from the top prime through the block: P_2 = p_{k-1}, ...
    if (big_k <= row.omega) row.p_k = pt.nth(e.k - big_k + 1);
    detail::finish_row(row);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace schemmel
