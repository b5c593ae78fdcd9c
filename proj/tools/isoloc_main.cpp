// Command-line front end: ingest line-delimited JSON corpus entries and run
// the local-invariant pipeline over them.
//
// Subcommands:
//   analyze   per-prime reduction data for single curves
//   verify    predict-vs-compute comparison for isogenous pairs
//   periods   archimedean reports: period ratios and q-expansion checks
//   families  emit seeded random 2- or 3-isogeny corpora
//
// Exit codes: 0 clean, 1 verification mismatch, 2 input error, 3 precision
// rejected. Reports go to stdout as JSON lines in input order; diagnostics to
// stderr. Identical inputs and flags produce byte-identical stdout.

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <isoloc/corpus.hpp>
#include <isoloc/modular.hpp>
#include <isoloc/verify.hpp>

namespace {

using nlohmann::ordered_json;

constexpr mpfr_prec_t kMinPrecision = 64;
constexpr long kRatioTolBits = 40;  // 2^-40, comfortably below the 1e-9 contract
constexpr int kRealDigits = 30;

struct Options {
  std::string input = "-";
  long precision = 256;
  long terms = 200;
  std::vector<long> primes;
  long jobs = 1;
  bool no_periods = false;
};

// One processed corpus line: payload for stdout, diagnostics for stderr, and
// how the entry should count toward the exit code.
struct LineResult {
  std::string out;
  std::string diag;
  bool mismatch = false;
  bool input_error = false;
  bool skipped = false;
  std::map<std::string, long> rows;  // Table-row labels seen, for the summary
};

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> lines;
  auto drain = [&](std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
    }
  };
  if (path == "-") {
    drain(std::cin);
  } else {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    drain(in);
  }
  return lines;
}

std::string rat_str(const isoloc::Rational& r) { return r.get_str(); }

ordered_json rational_field(const isoloc::Rational& r) {
  if (isoloc::den(r) == 1 && isoloc::num(r).fits_slong_p())
    return ordered_json(isoloc::num(r).get_si());
  return ordered_json(r.get_str());
}

ordered_json curve_json(const isoloc::Curve& e) {
  ordered_json a = ordered_json::array();
  for (const auto& c : e.ainvs()) a.push_back(rational_field(c));
  return a;
}

ordered_json local_json(const isoloc::LocalData& d) {
  ordered_json j;
  j["type"] = d.type.str();
  j["delta"] = d.delta;
  j["conductor"] = d.f;
  j["components"] = d.m;
  j["tamagawa"] = rat_str(isoloc::Rational(d.c));
  j["class"] = isoloc::reduction_name(d.cls);
  return j;
}

ordered_json prediction_json(const isoloc::LocalPrediction& p) {
  ordered_json j;
  j["row"] = p.row;
  if (p.delta) j["delta"] = *p.delta;
  if (p.type) j["type"] = p.type->str();
  if (p.conductor) j["conductor"] = *p.conductor;
  if (p.tamagawa_ratio) j["tamagawa_ratio"] = rat_str(*p.tamagawa_ratio);
  if (p.scalar_valuation) j["scalar_valuation"] = *p.scalar_valuation;
  return j;
}

std::vector<isoloc::Int> select_primes(const isoloc::PreparedPair& P,
                                       const std::vector<long>& filter) {
  std::vector<isoloc::Int> all = relevant_primes(P);
  if (filter.empty()) return all;
  std::vector<isoloc::Int> out;
  for (const isoloc::Int& l : all)
    for (long f : filter)
      if (l == f) out.push_back(l);
  return out;
}

// Realize an entry for verification. Distinguishes three failure grades:
// skip (no rational kernel to quotient by), pair mismatch (well-formed curves
// that fail the isogeny claim), and input error (everything else).
isoloc::Isogeny realize_checked(const isoloc::CorpusEntry& e) { return isoloc::realize(e); }

bool is_pair_claim_failure(const std::string& msg) {
  return msg.find("no rational isogeny") != std::string::npos ||
         msg.find("not isomorphic to curve_b") != std::string::npos;
}

LineResult process_verify(const std::string& line, const Options& opt) {
  LineResult res;
  isoloc::CorpusEntry entry;
  try {
    entry = isoloc::parse_entry(line);
  } catch (const std::exception& ex) {
    res.input_error = true;
    res.diag = std::string("input error: ") + ex.what();
    return res;
  }
  try {
    isoloc::Isogeny phi = realize_checked(entry);
    isoloc::PreparedPair pair = isoloc::prepare_pair(phi);
    ordered_json j;
    j["label"] = entry.label;
    j["p"] = entry.p;
    ordered_json prime_reports = ordered_json::array();
    bool ok = true;
    for (const isoloc::Int& l : select_primes(pair, opt.primes)) {
      isoloc::LocalComparison cmp = isoloc::compare_local(pair, l);
      ordered_json pj;
      pj["l"] = l.get_str();
      pj["predicted"] = prediction_json(cmp.pred);
      pj["source"] = local_json(cmp.source);
      pj["target"] = local_json(cmp.target);
      pj["scalar_valuation"] = cmp.scalar_valuation;
      pj["mismatches"] = cmp.mismatches;
      prime_reports.push_back(std::move(pj));
      res.rows[cmp.pred.row] += 1;
      if (!cmp.ok()) ok = false;
    }
    j["primes"] = std::move(prime_reports);
    if (!opt.no_periods) {
      isoloc::PeriodComparison pc =
          isoloc::compare_periods(pair, static_cast<mpfr_prec_t>(opt.precision), kRatioTolBits);
      ordered_json per;
      per["predicted_real_ratio"] = rat_str(pc.predicted_real_ratio);
      per["predicted_complex_ratio"] = rat_str(pc.predicted_complex_ratio);
      per["real_ratio"] = pc.real_ratio.to_string(kRealDigits);
      per["complex_ratio"] = pc.complex_ratio.to_string(kRealDigits);
      per["kappa"] = pc.kappa;
      per["tolerance"] = "2^-" + std::to_string(kRatioTolBits);
      per["real_ok"] = pc.real_ok;
      per["complex_ok"] = pc.complex_ok;
      j["periods"] = std::move(per);
      if (!pc.real_ok || !pc.complex_ok) ok = false;
    }
    j["ok"] = ok;
    res.out = j.dump();
    res.mismatch = !ok;
  } catch (const isoloc::SkipEntry& ex) {
    res.skipped = true;
    res.diag = entry.label + ": " + ex.what() + " (skipped)";
  } catch (const std::runtime_error& ex) {
    if (is_pair_claim_failure(ex.what())) {
      ordered_json j;
      j["label"] = entry.label;
      j["p"] = entry.p;
      j["ok"] = false;
      j["mismatches"] = {std::string("pair: ") + ex.what()};
      res.out = j.dump();
      res.mismatch = true;
      res.diag = entry.label + ": " + ex.what();
    } else {
      res.input_error = true;
      res.diag = entry.label + ": input error: " + ex.what();
    }
  } catch (const std::exception& ex) {
    res.input_error = true;
    res.diag = entry.label + ": input error: " + ex.what();
  }
  return res;
}

LineResult process_analyze(const std::string& line, const Options& opt) {
  LineResult res;
  try {
    ordered_json in = ordered_json::parse(line);
    std::string label;
    ordered_json curve_field;
    std::vector<isoloc::Int> hint;
    if (in.is_array()) {
      curve_field = in;
    } else if (in.is_object()) {
      if (in.contains("label")) label = in["label"].get<std::string>();
      if (in.contains("curve"))
        curve_field = in["curve"];
      else if (in.contains("curve_a"))
        curve_field = in["curve_a"];
      else
        throw std::runtime_error("entry has no curve field");
      if (in.contains("bad_primes"))
        for (const auto& q : in["bad_primes"]) hint.push_back(isoloc::Int(q.get<long>()));
    } else {
      throw std::runtime_error("expected a JSON array or object");
    }
    if (!curve_field.is_array() || curve_field.size() != 5)
      throw std::runtime_error("curve must be an array of five coefficients");
    std::array<isoloc::Rational, 5> a;
    for (int i = 0; i < 5; ++i) a[i] = isoloc::detail::json_rational(curve_field[i]);
    isoloc::Curve e(a);
    auto [mini, map] = isoloc::global_minimal_model(e);
    ordered_json j;
    if (!label.empty()) j["label"] = label;
    j["curve"] = curve_json(e);
    j["minimal_model"] = curve_json(mini);
    j["disc"] = rat_str(e.disc());
    j["j"] = rat_str(e.j());
    std::vector<isoloc::Int> primes;
    if (!opt.primes.empty()) {
      for (long l : opt.primes) primes.push_back(isoloc::Int(l));
    } else if (!hint.empty()) {
      primes = hint;
    } else {
      primes = isoloc::bad_primes(mini);
    }
    ordered_json arr = ordered_json::array();
    for (const isoloc::Int& l : primes) {
      isoloc::LocalData d = isoloc::local_data(mini, l);
      ordered_json pj = local_json(d);
      ordered_json keyed;
      keyed["l"] = l.get_str();
      for (auto& [k, v] : pj.items()) keyed[k] = v;
      arr.push_back(std::move(keyed));
    }
    j["primes"] = std::move(arr);
    res.out = j.dump();
  } catch (const std::exception& ex) {
    res.input_error = true;
    res.diag = std::string("input error: ") + ex.what();
  }
  return res;
}

LineResult process_periods(const std::string& line, const Options& opt) {
  LineResult res;
  isoloc::CorpusEntry entry;
  try {
    entry = isoloc::parse_entry(line);
  } catch (const std::exception& ex) {
    res.input_error = true;
    res.diag = std::string("input error: ") + ex.what();
    return res;
  }
  try {
    isoloc::Isogeny phi = realize_checked(entry);
    isoloc::PreparedPair pair = isoloc::prepare_pair(phi);
    auto prec = static_cast<mpfr_prec_t>(opt.precision);
    ordered_json j;
    j["label"] = entry.label;
    j["p"] = entry.p;
    auto side_json = [&](const isoloc::Curve& e) {
      isoloc::Periods ps = isoloc::periods(e, prec);
      ordered_json s;
      s["model"] = curve_json(e);
      s["rectangular"] = ps.rectangular;
      s["omega1"] = ps.omega1.to_string(kRealDigits);
      s["omega2_im"] = ps.omega2_im.to_string(kRealDigits);
      s["real_period"] = ps.real_period.to_string(kRealDigits);
      s["complex_period"] = ps.complex_period.to_string(kRealDigits);
      return s;
    };
    j["source"] = side_json(pair.phi.domain);
    j["target"] = side_json(pair.phi.codomain);
    isoloc::PeriodComparison pc = isoloc::compare_periods(pair, prec, kRatioTolBits);
    ordered_json ratio;
    ratio["lambda"] = rat_str(pc.predicted_real_ratio);
    ratio["kappa"] = pc.kappa;
    ratio["pullback_scalar"] = rat_str(pair.phi.scalar);
    ratio["real_ratio"] = pc.real_ratio.to_string(kRealDigits);
    ratio["complex_ratio"] = pc.complex_ratio.to_string(kRealDigits);
    ratio["predicted_real_ratio"] = rat_str(pc.predicted_real_ratio);
    ratio["predicted_complex_ratio"] = rat_str(pc.predicted_complex_ratio);
    ratio["tolerance"] = "2^-" + std::to_string(kRatioTolBits);
    ratio["real_ok"] = pc.real_ok;
    ratio["complex_ok"] = pc.complex_ok;
    j["ratio"] = std::move(ratio);
    bool mism = !pc.real_ok || !pc.complex_ok;

    // Multiplicative-or-good everywhere and p odd: report the three-way
    // equivalence ratio = p <=> unit pullback scalar <=> rational kernel.
    bool semistable = true;
    for (const isoloc::Int& l : relevant_primes(pair)) {
      if (isoloc::local_data(pair.phi.domain, l).cls == isoloc::ReductionClass::Additive ||
          isoloc::local_data(pair.phi.codomain, l).cls == isoloc::ReductionClass::Additive)
        semistable = false;
    }
    if (semistable && pair.p % 2 == 1) {
      bool ratio_is_p = pc.predicted_real_ratio == isoloc::Rational(pair.p);
      bool scalar_unit = abs(pair.phi.scalar) == 1;
      bool rational_kernel = isoloc::kernel_is_rational(pair.phi);
      ordered_json eq;
      eq["ratio_is_p"] = ratio_is_p;
      eq["pullback_scalar_is_unit"] = scalar_unit;
      eq["kernel_rational"] = rational_kernel;
      bool consistent = ratio_is_p == scalar_unit && scalar_unit == rational_kernel;
      eq["consistent"] = consistent;
      j["semistable_equivalence"] = std::move(eq);
      if (!consistent) mism = true;
    }

    ordered_json dt;
    dt["terms"] = opt.terms;
    dt["source_error"] = isoloc::delta_tau_check(pair.phi.domain, opt.terms, prec)
                             .to_string(kRealDigits);
    dt["target_error"] = isoloc::delta_tau_check(pair.phi.codomain, opt.terms, prec)
                             .to_string(kRealDigits);
    j["discriminant_series"] = std::move(dt);

    if (pair.p % 2 == 1) {
      isoloc::EtaQuotientReport eq = isoloc::eta_quotient_check(pair, opt.terms, prec);
      ordered_json ej;
      ej["computed"] = eq.computed.to_string(kRealDigits);
      ej["reconstructed"] = rat_str(eq.reconstructed);
      ej["error"] = eq.error.to_string(kRealDigits);
      ej["expected"] = rat_str(eq.expected);
      ej["root_exists"] = eq.root_exists;
      ej["twelfth_power_ok"] = eq.twelfth_power_ok;
      j["eta_quotient"] = std::move(ej);
      if (!eq.twelfth_power_ok) mism = true;
    }
    j["ok"] = !mism;
    res.out = j.dump();
    res.mismatch = mism;
  } catch (const isoloc::SkipEntry& ex) {
    res.skipped = true;
    res.diag = entry.label + ": " + ex.what() + " (skipped)";
  } catch (const std::runtime_error& ex) {
    if (is_pair_claim_failure(ex.what())) {
      res.mismatch = true;
      res.diag = entry.label + ": " + ex.what();
      ordered_json j;
      j["label"] = entry.label;
      j["p"] = entry.p;
      j["ok"] = false;
      j["mismatches"] = {std::string("pair: ") + ex.what()};
      res.out = j.dump();
    } else {
      res.input_error = true;
      res.diag = entry.label + ": input error: " + ex.what();
    }
  } catch (const std::exception& ex) {
    res.input_error = true;
    res.diag = entry.label + ": input error: " + ex.what();
  }
  return res;
}

// Run `work` over all lines with a share-nothing pool and emit the results in
// input order as they become ready.
template <typename Fn>
int run_pool(const std::vector<std::string>& lines, long jobs, const Fn& work,
             std::vector<LineResult>& results) {
  results.assign(lines.size(), LineResult{});
  if (jobs < 1) jobs = 1;
  jobs = std::min<long>(jobs, static_cast<long>(lines.size()) > 0 ? lines.size() : 1);
  std::vector<char> done(lines.size(), 0);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= lines.size()) return;
      LineResult r = work(lines[i]);
      {
        std::lock_guard<std::mutex> lock(mu);
        results[i] = std::move(r);
        done[i] = 1;
      }
      cv.notify_all();
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(jobs);
  for (long t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (size_t i = 0; i < lines.size(); ++i) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return done[i] == 1; });
    if (!results[i].out.empty()) std::printf("%s\n", results[i].out.c_str());
    if (!results[i].diag.empty()) std::fprintf(stderr, "%s\n", results[i].diag.c_str());
  }
  for (auto& t : threads) t.join();
  std::fflush(stdout);
  return 0;
}

int finish_code(const std::vector<LineResult>& results) {
  bool any_input_error = false, any_mismatch = false;
  for (const auto& r : results) {
    any_input_error |= r.input_error;
    any_mismatch |= r.mismatch;
  }
  if (any_input_error) return 2;
  if (any_mismatch) return 1;
  return 0;
}

int cmd_stream(const Options& opt, const std::string& mode) {
  if (opt.precision < kMinPrecision) {
    std::fprintf(stderr, "precision %ld rejected: at least %ld bits required\n", opt.precision,
                 static_cast<long>(kMinPrecision));
    return 3;
  }
  std::vector<std::string> lines;
  try {
    lines = read_lines(opt.input);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "%s\n", ex.what());
    return 2;
  }
  std::vector<LineResult> results;
  auto work = [&](const std::string& line) {
    if (mode == "verify") return process_verify(line, opt);
    if (mode == "periods") return process_periods(line, opt);
    return process_analyze(line, opt);
  };
  run_pool(lines, opt.jobs, work, results);
  if (mode == "verify") {
    long verified = 0, skipped = 0, failed = 0, errors = 0;
    std::map<std::string, long> rows;
    for (const auto& r : results) {
      if (r.skipped) ++skipped;
      else if (r.input_error) ++errors;
      else if (r.mismatch) ++failed;
      else ++verified;
      for (const auto& [k, v] : r.rows) rows[k] += v;
    }
    ordered_json summary;
    summary["entries"] = static_cast<long>(results.size());
    summary["verified"] = verified;
    summary["failed"] = failed;
    summary["skipped"] = skipped;
    summary["input_errors"] = errors;
    ordered_json rj = ordered_json::object();
    for (const auto& [k, v] : rows) rj[k] = v;
    summary["rows"] = std::move(rj);
    ordered_json wrap;
    wrap["summary"] = std::move(summary);
    std::printf("%s\n", wrap.dump().c_str());
    std::fflush(stdout);
  }
  return finish_code(results);
}

int cmd_families(long p, long count, unsigned long seed, long bound) {
  try {
    std::vector<isoloc::CorpusEntry> corpus = isoloc::family_corpus(p, count, seed, bound);
    for (const auto& e : corpus) std::printf("%s\n", isoloc::serialize_entry(e).c_str());
    std::fflush(stdout);
    return 0;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "%s\n", ex.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local invariants of p-isogenous elliptic curve pairs"};
  app.require_subcommand(1);

  Options opt;
  long fam_p = 2, fam_count = 200, fam_bound = 100;
  unsigned long fam_seed = 1;

  auto add_common = [&](CLI::App* sub, bool takes_input) {
    if (takes_input)
      sub->add_option("input", opt.input, "corpus file (JSON lines), - for stdin");
    sub->add_option("--precision", opt.precision, "working precision in bits (min 64)");
    sub->add_option("--terms", opt.terms, "series truncation for q-expansion checks");
    sub->add_option("--primes", opt.primes, "restrict reports to these primes")
        ->delimiter(',');
    sub->add_option("--jobs", opt.jobs, "parallel workers (output order is fixed)");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "per-prime reduction data for curves");
  add_common(analyze, true);
  CLI::App* verify = app.add_subcommand("verify", "predict and check invariants of pairs");
  add_common(verify, true);
  verify->add_flag("--no-periods", opt.no_periods, "skip archimedean checks");
  CLI::App* periods = app.add_subcommand("periods", "period lattices, ratios, series checks");
  add_common(periods, true);
  CLI::App* families = app.add_subcommand("families", "emit a seeded random isogeny corpus");
  families->add_option("--p", fam_p, "isogeny degree, 2 or 3");
  families->add_option("--count", fam_count, "number of pairs");
  families->add_option("--seed", fam_seed, "RNG seed");
  families->add_option("--bound", fam_bound, "coefficient box bound");

  CLI11_PARSE(app, argc, argv);

  if (analyze->parsed()) return cmd_stream(opt, "analyze");
  if (verify->parsed()) return cmd_stream(opt, "verify");
  if (periods->parsed()) return cmd_stream(opt, "periods");
  if (families->parsed()) return cmd_families(fam_p, fam_count, fam_seed, fam_bound);
  return 2;
}
