#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "schemmel/certify.hpp"
#include "oracles.hpp"

using namespace schemmel;

namespace {

std::vector<u64> member_values(const EnumerationCertificate& cert) {
  std::vector<u64> out;
  for (const FrRecord& m : cert.members) out.push_back(m.n);
  return out;
}

}  // namespace

TEST_CASE("tail bound worked examples") {
  PrimeTable pt;

  const TailBound a = tail_lower_bound(pt, 9699690, 1);
  CHECK(a.t == 8);  // the product 2*3*5*7*11*13*17*19 lands exactly on the horizon
  CHECK(a.bound == 1658880);

  const TailBound b = tail_lower_bound(pt, 30, 3);
  CHECK(b.t == 3);  // only p_3 = 5 fits below 30 starting after b(3) = 2
  CHECK(b.bound == 8);

  // one below the next interval boundary (35): unchanged by monotonicity
  CHECK(tail_lower_bound(pt, 34, 3).bound == 8);
  // crossing the boundary keeps the bound continuous here
  CHECK(tail_lower_bound(pt, 35, 3).bound == 8);

  CHECK_THROWS_AS(tail_lower_bound(pt, 4, 3), std::invalid_argument);
}

TEST_CASE("tail bound is sound: no class value beyond the horizon dips below it") {
  PrimeTable pt;
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const u64 r = rng() % 5 + 1;
    const u64 horizon = pt.nth(base_index(pt, r) + 1) + rng() % 1000000;
    const u64 bound = tail_lower_bound(pt, horizon, r).bound;
    for (int i = 0; i < 400; ++i) {
      const u64 m = horizon + 1 + rng() % (7 * horizon);
      if (!in_coprimality_class(pt, m, r)) continue;
      INFO("r = " << r << ", horizon = " << horizon << ", m = " << m);
      REQUIRE(schemmel::schemmel(pt, m, r) >= bound);
    }
  }
}

TEST_CASE("tail bound grows monotonically with the horizon") {
  PrimeTable pt;
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const u64 r = rng() % 6 + 1;
    const u64 lo = pt.nth(base_index(pt, r) + 1) + rng() % 500000;
    const u64 hi = lo + 1 + rng() % 500000;
    REQUIRE(tail_lower_bound(pt, lo, r).bound <= tail_lower_bound(pt, hi, r).bound);
  }
}

TEST_CASE("enumeration reproduces the known first members") {
  PrimeTable pt;
  CHECK(member_values(enumerate_sparsely(pt, 1, 30)) == std::vector<u64>{2, 6, 12, 18, 30});
  CHECK(member_values(enumerate_sparsely(pt, 2, 105)) == std::vector<u64>{3, 15, 21, 45, 105});
  CHECK(member_values(enumerate_sparsely(pt, 3, 10)) == std::vector<u64>{1, 5, 7});
  CHECK(member_values(enumerate_sparsely(pt, 4, 30)) == std::vector<u64>{5});
  CHECK(member_values(enumerate_sparsely(pt, 5, 30)) == std::vector<u64>{1, 7, 11, 13});
}

TEST_CASE("enumeration matches the frozen third-order list to 120000") {
  PrimeTable pt;
  const std::vector<u64> expected{
      1,     5,     7,     35,    55,    65,    85,    95,    175,   245,   385,   455,
      595,   665,   805,   875,   1015,  1085,  1295,  1435,  1925,  2275,  2695,  3185,
      5005,  6545,  7315,  7735,  8855,  10465, 11165, 11935, 13195, 14245, 15785, 16555,
      16835, 18095, 18655, 18865, 25025, 25795, 27335, 35035, 36575, 38675, 45815, 55055,
      65065, 85085, 95095, 115115};
  const EnumerationCertificate cert = enumerate_sparsely(pt, 3, 120000);
  CHECK(member_values(cert) == expected);

  // certificate internals: records are increasing with strictly
  // increasing totient values, all below the tail bound
  for (std::size_t i = 1; i < cert.members.size(); ++i) {
    REQUIRE(cert.members[i - 1].n < cert.members[i].n);
    REQUIRE(cert.members[i - 1].s_r < cert.members[i].s_r);
  }
  for (const FrRecord& m : cert.members) {
    REQUIRE(m.s_r == schemmel::schemmel(pt, m.n, 3));
    REQUIRE(m.s_r < cert.tail.bound);
    REQUIRE(m.horizon == cert.horizon);
  }
}

TEST_CASE("enumeration agrees with the brute-force oracle at unit scale") {
  PrimeTable pt;
  for (u64 r = 1; r <= 4; ++r) {
    const u64 x = 3000;
    const EnumerationCertificate cert = enumerate_sparsely(pt, r, x);
    const std::vector<u64> naive = oracle::sparse_members(r, x, 60000);
    INFO("r = " << r);
    // the oracle's fixed bound must itself be conclusive at this scale
    REQUIRE(tail_lower_bound(pt, 60000, r).bound > cert.members.back().s_r);
    REQUIRE(member_values(cert) == naive);
  }
}

TEST_CASE("enumeration output is independent of threads and segmentation") {
  PrimeTable pt;
  EnumerateOptions serial;
  serial.sieve.segment_entries = 2048;
  EnumerateOptions parallel;
  parallel.sieve.segment_entries = 1 << 14;
  parallel.sieve.threads = 4;
  const auto a = enumerate_sparsely(pt, 2, 50000, serial);
  const auto b = enumerate_sparsely(pt, 2, 50000, parallel);
  REQUIRE(member_values(a) == member_values(b));
  REQUIRE(a.horizon == b.horizon);
  REQUIRE(a.tail.bound == b.tail.bound);
}

TEST_CASE("a horizon cap below the initial horizon is inconclusive, exit path distinct") {
  PrimeTable pt;
  EnumerateOptions opt;
  opt.horizon_cap = 100;  // initial horizon for (r=1, upto=30) is 210
  CHECK_THROWS_AS(enumerate_sparsely(pt, 1, 30, opt), inconclusive_error);
  try {
    enumerate_sparsely(pt, 1, 30, opt);
  } catch (const inconclusive_error& e) {
    CHECK(e.r == 1);
    CHECK(e.horizon_cap == 100);
    CHECK(e.undecided.empty());
    CHECK(std::string(e.what()).find("inconclusive") != std::string::npos);
  }
}

TEST_CASE("suffix scan classifies undecided candidates when starved of horizon") {
  PrimeTable pt;
  // At an artificially small horizon the tail bound cannot cover the
  // survivors; the scan must park them as undecided, never accept them.
  const u64 tail = tail_lower_bound(pt, 32, 1).bound;
  REQUIRE(tail == 8);  // floor(32 * 8 / 30)
  detail::SuffixScan scan = detail::scan_horizon(pt, 1, 30, 32, tail, SieveOptions{});
  std::vector<u64> accepted;
  for (auto it = scan.found.rbegin(); it != scan.found.rend(); ++it) accepted.push_back(it->first);
  std::vector<u64> undecided(scan.undecided.rbegin(), scan.undecided.rend());
  // 30 survives the suffix screen over (30, 32] with phi(30) = 8, but the
  // bound cannot clear it: 8 < 8 fails, so it must land in undecided
  CHECK(accepted == std::vector<u64>{2, 6, 12, 18});
  CHECK(undecided == std::vector<u64>{30});
}

TEST_CASE("membership decisions with smallest refuters") {
  PrimeTable pt;

  const MembershipResult m9 = is_sparsely(pt, 9, 2);
  CHECK_FALSE(m9.member);
  CHECK(m9.reason == MembershipResult::Reason::refuted);
  CHECK(m9.refuter == 15);

  const MembershipResult m4 = is_sparsely(pt, 4, 1);
  CHECK_FALSE(m4.member);
  CHECK(m4.refuter == 6);

  const MembershipResult m2 = is_sparsely(pt, 2, 1);
  CHECK(m2.member);
  REQUIRE(m2.record.has_value());
  CHECK(m2.record->n == 2);
  CHECK(m2.record->s_r == 1);

  const MembershipResult m10 = is_sparsely(pt, 10, 3);
  CHECK_FALSE(m10.member);
  CHECK(m10.reason == MembershipResult::Reason::outside_class);
  CHECK_FALSE(m10.refuter.has_value());

  const MembershipResult big = is_sparsely(pt, 115115, 3);
  CHECK(big.member);
  REQUIRE(big.record.has_value());
  CHECK(big.record->s_r == 12800);
  CHECK(tail_lower_bound(pt, big.record->horizon, 3).bound > 12800);
}

TEST_CASE("unity is a member exactly when r + 1 is composite") {
  PrimeTable pt;
  for (u64 r = 1; r <= 12; ++r) {
    const bool composite = r + 1 > 3 && !pt.is_prime(r + 1);
    INFO("r = " << r);
    REQUIRE(is_sparsely(pt, 1, r).member == composite);
  }
}

TEST_CASE("membership agrees with enumeration over a window") {
  PrimeTable pt;
  for (u64 r : {1, 2, 3}) {
    const EnumerationCertificate cert = enumerate_sparsely(pt, r, 400);
    std::vector<u64> via_queries;
    for (u64 n = 1; n <= 400; ++n)
      if (in_coprimality_class(pt, n, r) && is_sparsely(pt, n, r).member)
        via_queries.push_back(n);
    INFO("r = " << r);
    REQUIRE(via_queries == member_values(cert));
  }
}

TEST_CASE("the membership horizon is minimal for the certified tail bound") {
  PrimeTable pt;
  std::mt19937_64 rng(303);
  for (int i = 0; i < 300; ++i) {
    const u64 r = rng() % 6 + 1;
    const u64 s = rng() % 100000 + 1;
    const u64 y = detail::horizon_for_value(pt, r, s, u64{1} << 40);
    const u64 first = pt.nth(base_index(pt, r) + 1);
    INFO("r = " << r << ", s = " << s << ", y = " << y);
    REQUIRE(tail_lower_bound(pt, y, r).bound > s);
    if (y > first) REQUIRE(tail_lower_bound(pt, y - 1, r).bound <= s);
  }
}

TEST_CASE("certificate replay accepts the genuine article and rejects tampering") {
  PrimeTable pt;
  EnumerationCertificate cert = enumerate_sparsely(pt, 2, 5000);
  REQUIRE(replay_certificate(pt, cert).ok);

  EnumerationCertificate forged = cert;
  forged.members[3].s_r += 1;
  CHECK_FALSE(replay_certificate(pt, forged).ok);

  forged = cert;
  forged.members.erase(forged.members.begin() + 2);
  CHECK_FALSE(replay_certificate(pt, forged).ok);

  forged = cert;
  forged.members[1].n = 9999;  // not a member at all
  CHECK_FALSE(replay_certificate(pt, forged).ok);

  forged = cert;
  forged.tail.bound += 1;
  CHECK_FALSE(replay_certificate(pt, forged).ok);

  forged = cert;
  forged.members[0].factors.factors.front().exp += 1;  // inconsistent factorization
  CHECK_FALSE(replay_certificate(pt, forged).ok);
}
