// Command-line front end: totient evaluation, cached sieving, certified
// enumeration, membership queries, member construction, and the
// verification/report suites.  Data goes to --out (with a reproducibility
// manifest alongside) or to standard output; all output is deterministic
// and independent of --threads.
//
// Exit codes: 0 success, 1 failure or verification counterexample,
// 2 enumeration inconclusive below the horizon cap, 64 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "schemmel/schemmel.hpp"

using json = nlohmann::ordered_json;
using namespace schemmel;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string digest_of_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path + " for digesting");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string("fnv1a64:") + buf;
}

json factors_json(const FactoredInteger& f) {
  json a = json::array();
  for (const auto& [p, e] : f.factors) a.push_back(json::array({p, e}));
  return a;
}

std::string factors_compact(const FactoredInteger& f) {
  if (f.factors.empty()) return "1";
  std::string s;
  for (const auto& [p, e] : f.factors) {
    if (!s.empty()) s += "*";
    s += std::to_string(p);
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s;
}

// Sidecar describing how an output file was produced, written next to it.
void write_manifest(PrimeTable& pt, const std::string& command, const json& params,
                    const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["parameters"] = params;
  m["artifact_version"] = kVersionString;
  m["prime_table_limit"] = pt.limit();
  json outs = json::array();
  for (const auto& path : outputs)
    outs.push_back(json{{"path", path}, {"digest", digest_of_file(path)}});
  m["outputs"] = outs;

  const std::string mpath = outputs.front() + ".manifest.json";
  std::ofstream out(mpath, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + mpath);
  out << m.dump(2) << "\n";
  out.flush();
  if (!out.good()) throw std::runtime_error("write to " + mpath + " failed");
}

// Payload to --out (plus manifest) when a path was given, stdout otherwise.
void emit(PrimeTable& pt, const std::string& command, const json& params,
          const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << payload;
  out.flush();
  if (!out.good()) throw std::runtime_error("write to " + out_path + " failed");
  out.close();
  write_manifest(pt, command, params, {out_path});
}

// Bare cache filenames land in $SCHEMMEL_CACHE_DIR when it is set.
std::string resolve_cache_path(const std::string& out) {
  if (out.find('/') != std::string::npos) return out;
  if (const char* dir = std::getenv("SCHEMMEL_CACHE_DIR"))
    return (std::filesystem::path(dir) / out).string();
  return out;
}

std::string enumeration_json(const EnumerationCertificate& cert) {
  std::string payload;
  for (const FrRecord& m : cert.members) {
    json line;
    line["n"] = m.n;
    line["s_r"] = m.s_r;
    line["factors"] = factors_json(m.factors);
    line["horizon"] = m.horizon;
    if (m.n == 1) line["degenerate"] = true;
    payload += line.dump();
    payload += "\n";
  }
  return payload;
}

std::string enumeration_csv(const EnumerationCertificate& cert) {
  std::string payload = "n,s_r,factors,horizon,degenerate\n";
  for (const FrRecord& m : cert.members) {
    payload += std::to_string(m.n) + "," + std::to_string(m.s_r) + "," +
               factors_compact(m.factors) + "," + std::to_string(m.horizon) + "," +
               (m.n == 1 ? "1" : "0") + "\n";
  }
  return payload;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schemmel totients: evaluation, certified sparse enumeration, construction"};
  app.require_subcommand(1);

  unsigned threads = 1;
  std::size_t segment = SieveOptions{}.segment_entries;
  auto add_perf = [&](CLI::App* sub) {
    sub->add_option("--threads", threads,
                    "worker threads for sieving (default 1; results are identical for any value)");
    sub->add_option("--segment", segment, "sieve segment size in entries");
  };

  u64 r = 1, n = 0, upto = 0, k = 2, ell = 0, d = 1, kmax = 0, lo = 1, hi = 1;
  u64 horizon_cap = EnumerateOptions{}.horizon_cap;
  u64 big_k = 2, big_l = 1;
  std::size_t period_bytes = JacobsthalOptions{}.max_period_bytes;
  std::string out, format = "json";
  bool check = false;

  CLI::App* c_eval = app.add_subcommand("eval", "evaluate S_r(n)");
  c_eval->add_option("--r", r, "totient order")->required();
  c_eval->add_option("--n", n, "argument")->required();
  c_eval->add_option("--out", out, "write to this file instead of standard output");

  CLI::App* c_sieve = app.add_subcommand("sieve", "tabulate S_r over a range into a binary cache");
  c_sieve->add_option("--r", r, "totient order")->required();
  c_sieve->add_option("--lo", lo, "first argument (>= 1)")->required();
  c_sieve->add_option("--hi", hi, "last argument")->required();
  c_sieve
      ->add_option("--out", out,
                   "cache file; a bare name lands in $SCHEMMEL_CACHE_DIR when that is set")
      ->required();
  c_sieve->add_flag("--check", check, "read the cache back and compare before reporting");
  add_perf(c_sieve);

  CLI::App* c_enum = app.add_subcommand("enumerate", "certified sparse-value enumeration");
  c_enum->add_option("--r", r, "totient order")->required();
  c_enum->add_option("--upto", upto, "report members n <= upto")->required();
  c_enum->add_option("--horizon-cap", horizon_cap, "give up (exit 2) past this scan horizon");
  c_enum->add_option("--format", format, "json (one record per line) or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  c_enum->add_option("--out", out, "write to this file instead of standard output");
  add_perf(c_enum);

  CLI::App* c_member = app.add_subcommand("is-member", "decide one membership query");
  c_member->add_option("--r", r, "totient order")->required();
  c_member->add_option("--n", n, "candidate")->required();
  c_member->add_option("--horizon-cap", horizon_cap, "give up (exit 2) past this scan horizon");
  c_member->add_option("--out", out, "write to this file instead of standard output");
  add_perf(c_member);

  CLI::App* c_construct = app.add_subcommand("construct", "build one guaranteed member");
  c_construct->add_option("--r", r, "totient order")->required();
  c_construct->add_option("--k", k, "prime index of the block end")->required();
  c_construct->add_option("--ell", ell, "offset of the top prime past p_k");
  c_construct->add_option("--d", d, "cofactor, all prime factors above r");
  c_construct->add_option("--out", out, "write to this file instead of standard output");

  CLI::App* c_family = app.add_subcommand("construct-family",
                                          "maximal-offset members for k up to --k-max, as CSV");
  c_family->add_option("--r", r, "totient order")->required();
  c_family->add_option("--k-max", kmax, "largest prime index to use")->required();
  c_family->add_option("--out", out, "write to this file instead of standard output");

  CLI::App* c_jacob = app.add_subcommand("jacobsthal", "largest coprime gap of the r-primorial");
  c_jacob->add_option("--r", r, "totient order")->required();
  c_jacob->add_option("--max-period-bytes", period_bytes, "memory budget for the period scan");
  c_jacob->add_option("--out", out, "write to this file instead of standard output");

  CLI::App* c_lambda = app.add_subcommand("lambda", "separation root for index k and order r");
  c_lambda->add_option("--r", r, "totient order")->required();
  c_lambda->add_option("--k", k, "separation index (>= 2)")->required();
  c_lambda->add_option("--out", out, "write to this file instead of standard output");

  CLI::App* c_verify = app.add_subcommand("verify", "replay and check every certified suite");
  c_verify->add_option("--r", r, "totient order")->required();
  c_verify->add_option("--upto", upto, "verify members n <= upto")->required();
  c_verify->add_option("--horizon-cap", horizon_cap, "give up (exit 2) past this scan horizon");
  c_verify->add_option("--out", out, "write the report here instead of standard output");
  add_perf(c_verify);

  CLI::App* c_report = app.add_subcommand("report", "asymptotic ratio table for members, as CSV");
  c_report->add_option("--r", r, "totient order")->required();
  c_report->add_option("--upto", upto, "tabulate members n <= upto")->required();
  c_report->add_option("--K", big_k, "separation index for the P_K column (>= 2)");
  c_report->add_option("--L", big_l, "gap index for the Q_L column (>= 1)");
  c_report->add_option("--horizon-cap", horizon_cap, "give up (exit 2) past this scan horizon");
  c_report->add_option("--out", out, "write to this file instead of standard output");
  add_perf(c_report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  PrimeTable pt;
  SieveOptions sopt;
  sopt.threads = threads;
  sopt.segment_entries = segment;
  EnumerateOptions eopt;
  eopt.sieve = sopt;
  eopt.horizon_cap = horizon_cap;

  try {
    if (*c_eval) {
      json params{{"r", r}, {"n", n}};
      emit(pt, "eval", params, out, std::to_string(schemmel::schemmel(pt, n, r)) + "\n");

    } else if (*c_sieve) {
      json params{{"r", r}, {"lo", lo}, {"hi", hi}, {"threads", threads}, {"segment", segment}};
      const std::string path = resolve_cache_path(out);
      const SrTable table = sieve_sr_range(pt, lo, hi, r, sopt);
      write_sr_cache(table, path);
      if (check) {
        const SrTable back = read_sr_cache_expect(path, r, lo, hi);
        if (back.values != table.values)
          throw std::runtime_error(path + " did not read back identically");
      }
      write_manifest(pt, "sieve", params, {path});
      json summary;
      summary["r"] = r;
      summary["lo"] = lo;
      summary["hi"] = hi;
      summary["entries"] = table.values.size();
      summary["path"] = path;
      summary["digest"] = digest_of_file(path);
      std::cout << summary.dump() << "\n";

    } else if (*c_enum) {
      json params{{"r", r},
                  {"upto", upto},
                  {"horizon_cap", horizon_cap},
                  {"format", format},
                  {"threads", threads},
                  {"segment", segment}};
      const EnumerationCertificate cert = enumerate_sparsely(pt, r, upto, eopt);
      emit(pt, "enumerate", params, out,
           format == "csv" ? enumeration_csv(cert) : enumeration_json(cert));

    } else if (*c_member) {
      json params{{"r", r}, {"n", n}, {"horizon_cap", horizon_cap}};
      const MembershipResult res = is_sparsely(pt, n, r, eopt);
      json j;
      j["r"] = r;
      j["n"] = n;
      j["member"] = res.member;
      if (res.member) {
        j["s_r"] = res.record->s_r;
        j["factors"] = factors_json(res.record->factors);
        j["horizon"] = res.record->horizon;
      } else if (res.reason == MembershipResult::Reason::outside_class) {
        j["reason"] = "outside_class";
      } else {
        j["reason"] = "refuted";
        j["s_r"] = schemmel::schemmel(pt, n, r);
        j["refuter"] = *res.refuter;
        j["refuter_s_r"] = schemmel::schemmel(pt, *res.refuter, r);
      }
      emit(pt, "is-member", params, out, j.dump() + "\n");

    } else if (*c_construct) {
      json params{{"r", r}, {"k", k}, {"ell", ell}, {"d", d}};
      const ValidationReport rep = validate_params(pt, {r, k, ell, d});
      json j;
      j["r"] = r;
      j["k"] = k;
      j["ell"] = ell;
      j["d"] = d;
      j["valid"] = rep.valid;
      if (!rep.valid) {
        j["violations"] = rep.violations;
        emit(pt, "construct", params, out, j.dump() + "\n");
        return 1;
      }
      const FactoredInteger f = build_member(pt, {r, k, ell, d});
      j["n"] = f.n;
      j["s_r"] = schemmel_from_factors(f, r);
      j["factors"] = factors_json(f);
      emit(pt, "construct", params, out, j.dump() + "\n");

    } else if (*c_family) {
      json params{{"r", r}, {"k_max", kmax}};
      std::string payload = "k,ell,top_prime,log_n,n\n";
      for (const FamilyEntry& e : doubling_family(pt, r, kmax)) {
        payload += std::to_string(e.k) + "," + std::to_string(e.ell) + "," +
                   std::to_string(e.top_prime) + "," + fmt(e.log_n) + "," +
                   (e.n_exact ? std::to_string(*e.n_exact) : "") + "\n";
      }
      emit(pt, "construct-family", params, out, payload);

    } else if (*c_jacob) {
      json params{{"r", r}, {"max_period_bytes", period_bytes}};
      const JacobsthalRecord rec = jacobsthal_of_primorial(pt, r, {period_bytes});
      json j;
      j["r"] = rec.r;
      j["modulus"] = rec.modulus;
      j["J_r"] = rec.j;
      j["witness_start"] = rec.witness_start;
      emit(pt, "jacobsthal", params, out, j.dump() + "\n");

    } else if (*c_lambda) {
      json params{{"r", r}, {"k", k}};
      const LambdaRoot root = lambda_root(pt, k, r);
      json j;
      j["k"] = root.k;
      j["r"] = root.r;
      j["J_r"] = root.jacobsthal;
      j["value"] = root.value;
      j["residual"] = root.residual;
      emit(pt, "lambda", params, out, j.dump() + "\n");

    } else if (*c_verify) {
      json params{{"r", r},
                  {"upto", upto},
                  {"horizon_cap", horizon_cap},
                  {"threads", threads},
                  {"segment", segment}};
      std::string rep;
      bool ok = true;
      auto line = [&](bool pass, const std::string& what) {
        rep += std::string(pass ? "[PASS] " : "[COUNTEREXAMPLE] ") + what + "\n";
        ok = ok && pass;
      };

      const EnumerationCertificate cert = enumerate_sparsely(pt, r, upto, eopt);
      const ReplayResult replay = replay_certificate(pt, cert, sopt);
      line(replay.ok, "certificate replay: " + std::to_string(cert.members.size()) +
                          " members below " + std::to_string(upto) + ", horizon " +
                          std::to_string(cert.horizon) + ", tail bound " +
                          std::to_string(cert.tail.bound) +
                          (replay.ok ? "" : " -- " + replay.detail));

      const DivisorBoundsReport db = verify_divisor_bounds(pt, cert);
      std::string detail = "divisor bounds: " + std::to_string(db.inequalities_checked) +
                           " inequalities over " + std::to_string(db.members_checked) + " members";
      for (const auto& v : db.violations)
        detail += " -- n = " + std::to_string(v.n) + " breaks the " + v.which;
      line(db.passed(), detail);

      const StructureReport st = verify_structure(pt, cert);
      detail = "member structure: " + std::to_string(st.prime_members.size()) +
               " prime members, threshold " + std::to_string(st.threshold);
      for (const auto& v : st.violations)
        detail += " -- n = " + std::to_string(v.n) + ": " + v.what;
      if (st.prime_members != st.expected_prime_members)
        detail += " -- prime members differ from the admissible window";
      line(st.passed(), detail);

      const PrimeRatioReport pr = verify_prime_ratio_bound(pt, 396738);
      detail = "consecutive prime ratios: " + std::to_string(pr.pairs_checked) +
               " pairs below " + std::to_string(pr.limit) + ", " +
               std::to_string(pr.exceptions.size()) + " recorded exceptions";
      for (const auto& v : pr.violations)
        detail += " -- 5 * " + std::to_string(v.p_next) + " > 7 * " + std::to_string(v.p_j);
      line(pr.passed(), detail);

      const ConjectureScanReport sc = scan_conjectures(cert);
      if (sc.clean()) {
        rep += "[PASS] conjecture scan: no prime squares, no top-cube members among " +
               std::to_string(sc.members_checked) + " members\n";
      } else {
        // a counterexample here is a finding to publish, not a failure
        rep += "[FINDING] conjecture scan found counterexamples; exit stays 0\n";
        for (u64 v : sc.prime_squares)
          rep += "[FINDING] member " + std::to_string(v) + " is the square of a prime\n";
        for (u64 v : sc.top_cube_members)
          rep += "[FINDING] member " + std::to_string(v) +
                 " is divisible by the cube of its largest prime factor\n";
      }

      emit(pt, "verify", params, out, rep);
      if (!ok) return 1;

    } else if (*c_report) {
      json params{{"r", r},
                  {"upto", upto},
                  {"K", big_k},
                  {"L", big_l},
                  {"horizon_cap", horizon_cap},
                  {"threads", threads},
                  {"segment", segment}};
      const EnumerationCertificate cert = enumerate_sparsely(pt, r, upto, eopt);
      const RatioReport rr = ratio_report(pt, cert, big_k, big_l);
      std::string payload = "# r=" + std::to_string(rr.r) + " upto=" + std::to_string(upto) +
                            " K=" + std::to_string(rr.K) + " L=" + std::to_string(rr.L) +
                            " J_r=" + std::to_string(rr.jacobsthal) +
                            " lambda_K=" + fmt(rr.lambda_k) +
                            " inv_lambda_K=" + fmt(rr.inv_lambda_k) +
                            " Jr_over_r=" + fmt(rr.jr_over_r) + "\n";
      payload += "n,log_n,omega,P1,Q1,ratio_p1_logn,ratio_qL_logn,ratio_pK_logn,ratio_p1_log2n\n";
      for (const RatioRow& row : rr.rows) {
        payload += std::to_string(*row.n) + "," + fmt(row.log_n) + "," +
                   std::to_string(row.omega) + "," + std::to_string(row.p1) + "," +
                   std::to_string(row.q_l) + "," + fmt(row.p1_over_log) + "," +
                   fmt(row.ql_over_log) + "," +
                   (row.pk_over_log ? fmt(*row.pk_over_log) : "") + "," +
                   fmt(row.p1_over_log2) + "\n";
      }
      emit(pt, "report", params, out, payload);
    }
  } catch (const inconclusive_error& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
