// Acceptance gate: twelve end-to-end checks over the whole library, each
// reported as a single PASS/FAIL line with its wall-clock time.  A check
// with a time budget fails if it exceeds the budget, no matter the result.
// Exit status is 0 only when every check passes.
//
// The counterexample scan (check 11) is report-only: finding one is a
// discovery, not a defect, so it prints a loud banner and appends the
// details to acceptance-findings.json but does not fail the gate.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <schemmel/schemmel.hpp>

#include "oracles.hpp"

namespace {

using namespace schemmel;
using ull = unsigned long long;

int failures = 0;

void run(int idx, const std::string& what, double budget_s,
         const std::function<bool(std::string&)>& body) {
  std::string note;
  bool ok = false;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ok = body(note);
  } catch (const std::exception& e) {
    note = std::string("exception: ") + e.what();
  }
  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (ok && budget_s > 0 && dt > budget_s) {
    ok = false;
    char over[64];
    std::snprintf(over, sizeof over, "exceeded the %g s budget", budget_s);
    note = note.empty() ? over : note + "; " + over;
  }
  if (!ok) ++failures;
  std::string label = what + ' ';
  while (label.size() < 58) label += '.';
  std::printf("[%2d] %s %s (%.1fs)\n", idx, label.c_str(), ok ? "PASS" : "FAIL",
              dt);
  if (!note.empty()) std::printf("     %s\n", note.c_str());
  std::fflush(stdout);
}

std::vector<u64> member_values(const EnumerationCertificate& cert) {
  std::vector<u64> ns;
  ns.reserve(cert.members.size());
  for (const FrRecord& rec : cert.members) ns.push_back(rec.n);
  return ns;
}

std::string list_head(const std::vector<u64>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size() && i < 8; ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  if (v.size() > 8) s += ", ...";
  return s + "}";
}

}  // namespace

int main() {
  PrimeTable pt;

  // The r = 1..5 enumerations to 10^6 are shared by checks 5, 7 and 11;
  // whichever runs first pays for the build.
  std::vector<std::optional<EnumerationCertificate>> big(6);
  auto big_cert = [&](u64 r) -> const EnumerationCertificate& {
    if (!big[r]) big[r] = enumerate_sparsely(pt, r, 1'000'000);
    return *big[r];
  };

  std::printf("acceptance gate: 12 checks\n");

  run(1, "totient formula agrees with the counting form", 10.0,
      [&](std::string& note) {
        for (u64 r = 1; r <= 6; ++r)
          for (u64 n = 1; n <= 5000; ++n)
            if (schemmel::schemmel(pt, n, r) != schemmel_by_count(n, r)) {
              note = "mismatch at n = " + std::to_string(n) +
                     ", r = " + std::to_string(r);
              return false;
            }
        return true;
      });

  run(2, "certified enumeration matches brute force to 5000", 30.0,
      [&](std::string& note) {
        constexpr u64 x = 5000, m_max = 60000;
        for (u64 r = 1; r <= 4; ++r) {
          const EnumerationCertificate cert = enumerate_sparsely(pt, r, x);
          const std::vector<u64> naive = oracle::sparse_members(r, x, m_max);
          // The oracle only compares against [1, m_max]; make sure nothing
          // beyond m_max could refute any value it accepted.
          u64 worst = 0;
          for (u64 n : naive) worst = std::max(worst, oracle::totient(n, r));
          if (tail_lower_bound(pt, m_max, r).bound <= worst) {
            note = "oracle comparison window too small at r = " +
                   std::to_string(r);
            return false;
          }
          if (member_values(cert) != naive) {
            note = "member lists differ at r = " + std::to_string(r) +
                   ": certified " + list_head(member_values(cert)) +
                   " vs naive " + list_head(naive);
            return false;
          }
          for (const FrRecord& rec : cert.members)
            if (rec.s_r != oracle::totient(rec.n, r)) {
              note = "totient value differs at n = " + std::to_string(rec.n) +
                     ", r = " + std::to_string(r);
              return false;
            }
        }
        return true;
      });

  run(3, "first members at orders 1 and 2", 0.0, [&](std::string& note) {
    const std::vector<u64> one = member_values(enumerate_sparsely(pt, 1, 30));
    const std::vector<u64> two = member_values(enumerate_sparsely(pt, 2, 105));
    if (one != std::vector<u64>{2, 6, 12, 18, 30}) {
      note = "order 1 gave " + list_head(one);
      return false;
    }
    if (two != std::vector<u64>{3, 15, 21, 45, 105}) {
      note = "order 2 gave " + list_head(two);
      return false;
    }
    return true;
  });

  run(4, "primorial coprime-gap values through r = 13", 5.0,
      [&](std::string& note) {
        const u64 expect[14] = {0, 1, 2,  4,  4,  6,  6,
                                10, 10, 10, 10, 14, 14, 22};
        for (u64 r = 1; r <= 13; ++r) {
          const JacobsthalRecord rec = jacobsthal_of_primorial(pt, r);
          if (rec.j != expect[r]) {
            note = "r = " + std::to_string(r) + " gave " +
                   std::to_string(rec.j) + ", expected " +
                   std::to_string(expect[r]);
            return false;
          }
          const oracle::GapScan scan = oracle::max_coprime_gap(r);
          if (scan.j != rec.j || scan.modulus != rec.modulus) {
            note = "gcd-scan oracle disagrees at r = " + std::to_string(r);
            return false;
          }
        }
        return true;
      });

  run(5, "constructed members appear in certified lists", 120.0,
      [&](std::string& note) {
        u64 covered = 0;
        for (u64 r = 1; r <= 5; ++r) {
          std::set<u64> members;
          for (const FrRecord& rec : big_cert(r).members)
            members.insert(rec.n);
          for (u64 k = 1; k <= 12; ++k)
            for (u64 ell = 0; ell <= 4; ++ell)
              for (u64 d = 1; d <= 20; ++d) {
                const ConstructionParams c{r, k, ell, d};
                if (!validate_params(pt, c).valid) continue;
                const u64 n = build_member(pt, c).n;
                if (n > 1'000'000) continue;
                ++covered;
                if (!members.count(n)) {
                  note = "built n = " + std::to_string(n) +
                         " missing from the certified list (r = " +
                         std::to_string(r) + ", k = " + std::to_string(k) +
                         ", ell = " + std::to_string(ell) +
                         ", d = " + std::to_string(d) + ")";
                  return false;
                }
              }
        }
        if (covered < 50) {
          note = "only " + std::to_string(covered) +
                 " grid points landed in range; the check is vacuous";
          return false;
        }
        return true;
      });

  run(6, "prime members fill the admissible window, r <= 10", 30.0,
      [&](std::string& note) {
        const u64 thresholds[11] = {0, 3, 5, 11, 7, 17, 11, 31, 23, 17, 13};
        for (u64 r = 1; r <= 10; ++r) {
          const u64 thr = prime_membership_threshold(pt, r);
          if (thr != thresholds[r]) {
            note = "threshold at r = " + std::to_string(r) + " gave " +
                   std::to_string(thr);
            return false;
          }
          std::vector<u64> got;
          for (const FrRecord& rec : enumerate_sparsely(pt, r, 2000).members)
            if (rec.factors.factors.size() == 1 &&
                rec.factors.factors[0].exp == 1)
              got.push_back(rec.n);
          std::vector<u64> want;
          pt.reserve_limit(thr);
          for (u64 p : pt.primes()) {
            if (p >= thr) break;
            if (p > r) want.push_back(p);
          }
          if (got != want) {
            note = "prime members at r = " + std::to_string(r) + " gave " +
                   list_head(got) + ", expected " + list_head(want);
            return false;
          }
        }
        return true;
      });

  run(7, "divisor inequalities hold on all certified members", 300.0,
      [&](std::string& note) {
        for (u64 r = 1; r <= 5; ++r) {
          const DivisorBoundsReport rep =
              verify_divisor_bounds(pt, big_cert(r));
          if (!rep.passed()) {
            note = "r = " + std::to_string(r) + ": n = " +
                   std::to_string(rep.violations.front().n) + " breaks the " +
                   rep.violations.front().which;
            return false;
          }
        }
        return true;
      });

  run(8, "consecutive-prime ratio bound below 396738", 5.0,
      [&](std::string& note) {
        const PrimeRatioReport rep = verify_prime_ratio_bound(pt, 396738);
        if (!rep.passed()) {
          note = "violated at p_j = " +
                 std::to_string(rep.violations.front().p_j);
          return false;
        }
        if (rep.exceptions.size() != 3 || rep.pairs_checked < 30000) {
          note = "unexpected coverage: " + std::to_string(rep.pairs_checked) +
                 " pairs, " + std::to_string(rep.exceptions.size()) +
                 " exceptions";
          return false;
        }
        return true;
      });

  run(9, "separation root accuracy, k <= 10, r <= 13", 5.0,
      [&](std::string& note) {
        const double closed = std::sqrt(2.0) - 1.0;
        const LambdaRoot quad = lambda_root(pt, 2, 1);
        if (std::fabs(quad.value - closed) > 1e-12) {
          note = "quadratic root off by " +
                 std::to_string(std::fabs(quad.value - closed));
          return false;
        }
        for (u64 k = 2; k <= 10; ++k)
          for (u64 r = 1; r <= 13; ++r) {
            const LambdaRoot root = lambda_root(pt, k, r);
            if (!(root.value > 0 && root.value < 1) ||
                std::fabs(root.residual) > 1e-12) {
              note = "k = " + std::to_string(k) + ", r = " + std::to_string(r) +
                     ": residual " + std::to_string(root.residual);
              return false;
            }
          }
        return true;
      });

  run(10, "doubling-family ratio near 2 at k = 1000", 10.0,
      [&](std::string& note) {
        for (u64 r = 1; r <= 3; ++r) {
          const std::vector<FamilyEntry> fam = doubling_family(pt, r, 1000);
          const FamilyEntry& e = fam.back();
          if (e.k != 1000) {
            note = "family for r = " + std::to_string(r) + " stops at k = " +
                   std::to_string(e.k);
            return false;
          }
          const double ratio = double(e.top_prime) / e.log_n;
          if (!(ratio >= 1.85 && ratio <= 2.15)) {
            note = "r = " + std::to_string(r) + ": largest prime over log n = " +
                   std::to_string(ratio);
            return false;
          }
        }
        return true;
      });

  run(11, "counterexample scan over certified members", 0.0,
      [&](std::string& note) {
        bool findings = false;
        for (u64 r = 1; r <= 5; ++r) {
          const ConjectureScanReport rep = scan_conjectures(big_cert(r));
          if (rep.clean()) continue;
          findings = true;
          std::printf("     !! COUNTEREXAMPLE at r = %llu:", (ull)r);
          for (u64 n : rep.prime_squares)
            std::printf(" prime square %llu", (ull)n);
          for (u64 n : rep.top_cube_members)
            std::printf(" cubed top factor in %llu", (ull)n);
          std::printf("\n");
          if (FILE* f = std::fopen("acceptance-findings.json", "a")) {
            std::fprintf(f, "{\"r\":%llu,\"prime_squares\":[", (ull)r);
            for (std::size_t i = 0; i < rep.prime_squares.size(); ++i)
              std::fprintf(f, "%s%llu", i ? "," : "",
                           (ull)rep.prime_squares[i]);
            std::fprintf(f, "],\"top_cube_members\":[");
            for (std::size_t i = 0; i < rep.top_cube_members.size(); ++i)
              std::fprintf(f, "%s%llu", i ? "," : "",
                           (ull)rep.top_cube_members[i]);
            std::fprintf(f, "]}\n");
            std::fclose(f);
          }
        }
        if (findings)
          note = "counterexamples found and logged to acceptance-findings.json;"
                 " the scan itself still passes";
        return true;  // report-only by design
      });

  run(12, "order-1 enumeration to 10^6 inside 60 s", 60.0,
      [&](std::string& note) {
        EnumerateOptions opt;
        opt.sieve.threads = 1;
        const EnumerationCertificate cert =
            enumerate_sparsely(pt, 1, 1'000'000, opt);
        if (member_values(cert) != member_values(big_cert(1))) {
          note = "timed run disagrees with the shared certificate";
          return false;
        }
        return true;
      });

  if (failures == 0) {
    std::printf("all 12 checks passed\n");
    return 0;
  }
  std::printf("%d of 12 checks FAILED\n", failures);
  return 1;
}
