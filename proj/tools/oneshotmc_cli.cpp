// Command-line front end: distribution I/O, region computation, protocol
// simulation, lemma batteries, and the experiment drivers. stdout carries
// one JSON document per run; logs go to stderr.
//
// Exit codes: 0 ok, 2 parse error, 3 precondition violation, 4 budget.

#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "oneshot/batteries.hpp"
#include "oneshot/coding.hpp"
#include "oneshot/experiments.hpp"
#include "oneshot/json_io.hpp"

using namespace oneshot;

namespace {

Rate parse_rate(const std::string& s) {
  Rat bits = rat_parse(s);
  return Rate::from_bits(rat_double(bits));
}

struct Emitter {
  std::string command;
  std::vector<std::string> args;
  uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void emit(const nlohmann::json& result) const {
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    nlohmann::json doc;
    doc["manifest"] = run_manifest(command, args, seed, inputs, wall, outputs);
    doc["result"] = result;
    std::cout << doc.dump(2) << "\n";
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-shot multi-party message compression toolkit"};
  app.require_subcommand(1);

  std::string dist_path, out_path, format = "json", transcript_path;
  uint64_t seed = 1;
  int threads = 1;
  bool normalize = false;
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_option("--threads", threads, "worker threads")->capture_default_str();
  app.add_option("--out", out_path, "output path for tabular data");
  app.add_option("--format", format, "json|csv")->capture_default_str();
  app.add_flag("--normalize", normalize, "rescale non-normalized distribution files");

  // region
  auto* region = app.add_subcommand("region", "communication-region reports");
  std::string kind = "oneshot", r1_s = "1", r2_s = "1", delta_s = "1/4", eps_s = "1/20";
  std::string eps1_s = "1/10", eps2_s = "1/10", eps3_s = "1/10", s_path, t_path;
  region->add_option("--dist", dist_path, "distribution file over X,Y,Z,M,N")->required();
  region->add_option("--kind", kind, "oneshot|cmi|prior")->capture_default_str();
  region->add_option("--r1", r1_s, "rate 1 in bits");
  region->add_option("--r2", r2_s, "rate 2 in bits");
  region->add_option("--delta", delta_s, "delta (rational)");
  region->add_option("--eps", eps_s, "epsilon for the oneshot report");
  region->add_option("--eps1", eps1_s, "epsilon 1 (prior kind)");
  region->add_option("--eps2", eps2_s, "epsilon 2 (prior kind)");
  region->add_option("--eps3", eps3_s, "epsilon 3 (prior kind)");
  region->add_option("--s-dist", s_path, "auxiliary S file (default: M marginal)");
  region->add_option("--t-dist", t_path, "auxiliary T file (default: N marginal)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo protocol run");
  uint64_t trials = 100000;
  std::string perturb_s = "1/64";
  simulate->add_option("--dist", dist_path, "distribution file over X,Y,Z,M,N")->required();
  simulate->add_option("--r1", r1_s, "rate 1 in bits")->required();
  simulate->add_option("--r2", r2_s, "rate 2 in bits")->required();
  simulate->add_option("--delta", delta_s, "delta (rational, 1/sqrt integer)");
  simulate->add_option("--trials", trials, "trial count")->capture_default_str();
  simulate->add_option("--perturb-tol", perturb_s, "distinctness perturbation budget");
  simulate->add_option("--transcript", transcript_path, "JSON-lines transcript path");

  // testset
  auto* testset = app.add_subcommand("testset", "build/verify the acceptance set");
  std::string save_path, load_path;
  testset->add_option("--dist", dist_path, "distribution file over X,Y,Z,M,N");
  testset->add_option("--r1", r1_s, "rate 1 in bits");
  testset->add_option("--r2", r2_s, "rate 2 in bits");
  testset->add_option("--delta", delta_s, "delta (rational)");
  testset->add_option("--perturb-tol", perturb_s, "distinctness perturbation budget");
  testset->add_option("--save", save_path, "sidecar output path");
  testset->add_option("--load", load_path, "sidecar to load instead of building");

  // lemmas
  auto* lemmas = app.add_subcommand("lemmas", "exact property batteries");
  std::string suite = "restriction";
  int count = 100;
  lemmas->add_option("--suite", suite, "restriction|monotone|pinsker|convexsplit|bipartite|posdecode|tail1d|setA|sch");
  lemmas->add_option("--count", count, "instances per suite")->capture_default_str();

  // hardsw
  auto* hardsw = app.add_subcommand("hardsw", "hard source and one-way reduction");
  long big_n = 64;
  std::string heps_s = "1/64";
  hardsw->add_option("--N", big_n, "support parameter N")->capture_default_str();
  hardsw->add_option("--eps", heps_s, "target error (rational square)")->capture_default_str();

  // counterexample
  auto* cex = app.add_subcommand("counterexample", "full-support hypothesis-test counterexample");
  std::string ceps_s = "1/64", alpha_s;
  long cex_size = 4096;
  cex->add_option("--eps", ceps_s, "epsilon (solves alpha)")->capture_default_str();
  cex->add_option("--alpha", alpha_s, "alpha directly (overrides --eps)");
  cex->add_option("--size", cex_size, "|X|")->capture_default_str();

  // reduce-rand
  auto* rrand = app.add_subcommand("reduce-rand", "shared-randomness reduction");
  std::string rr_rate_s = "12";
  int rr_budget = 4096;
  rrand->add_option("--dist", dist_path, "Task B file over X,M,Z (built-in default)");
  rrand->add_option("--r", rr_rate_s, "Task B rate in bits")->capture_default_str();
  rrand->add_option("--delta", delta_s, "delta (rational)");
  rrand->add_option("--budget", rr_budget, "candidate draw budget")->capture_default_str();

  // lossy
  auto* lossy = app.add_subcommand("lossy", "lossy distributed source coding run");
  std::string lossy_spec;
  lossy->add_option("--spec", lossy_spec, "JSON spec file")->required();

  for (auto* sc : {region, simulate, testset, lemmas, hardsw, cex, rrand, lossy})
    sc->fallthrough();

  CLI11_PARSE(app, argc, argv);

  Emitter em;
  em.seed = seed;
  for (int i = 0; i < argc; ++i) em.args.push_back(argv[i]);
  if (!dist_path.empty()) em.inputs.push_back(dist_path);
  if (!out_path.empty()) em.outputs.push_back(out_path);

  try {
    if (region->parsed()) {
      em.command = "region";
      JointDist d = load_dist_file(dist_path, normalize);
      Rat delta = rat_parse(delta_s);
      RegionReport rep;
      if (kind == "oneshot") {
        rep = region_oneshot(d, parse_rate(r1_s), parse_rate(r2_s), delta, rat_parse(eps_s));
      } else if (kind == "cmi") {
        rep = region_cmi(d, delta, rat_double(rat_parse(r1_s)), rat_double(rat_parse(r2_s)));
      } else if (kind == "prior") {
        JointDist s = s_path.empty() ? d.marginal({"M"}) : load_dist_file(s_path, normalize);
        JointDist t = t_path.empty() ? d.marginal({"N"}) : load_dist_file(t_path, normalize);
        rep = region_compare_prior(d, s, t, rat_parse(eps1_s), rat_parse(eps2_s), rat_parse(eps3_s),
                                 delta, parse_rate(r1_s), parse_rate(r2_s));
      } else {
        throw ParseError("unknown region kind " + kind);
      }
      em.emit(region_report_json(rep));
    } else if (simulate->parsed()) {
      em.command = "simulate";
      JointDist d = load_dist_file(dist_path, normalize);
      ProtocolOptions opt;
      opt.seed = seed;
      opt.perturb_tolerance = rat_parse(perturb_s);
      opt.testset.threads = threads;
      ProtocolConfig cfg =
          make_protocol_config(d, parse_rate(r1_s), parse_rate(r2_s), rat_parse(delta_s), opt);
      std::ofstream tr;
      std::function<void(const TrialOutcome&)> cb;
      if (!transcript_path.empty()) {
        tr.open(transcript_path);
        em.outputs.push_back(transcript_path);
        cb = [&tr](const TrialOutcome& o) { tr << trial_json(o).dump() << "\n"; };
      }
      ErrorEstimate est = estimate_error(cfg, trials, threads, cb);
      nlohmann::json res = estimate_json(est);
      res["eps_design"] = rat_str(cfg.eps_design);
      res["perturb_tv"] = rat_str(cfg.src.perturb_tv);
      res["K"] = cfg.src.K;
      res["copies"] = {cfg.copies1, cfg.copies2};
      res["r3_bits"] = cfg.r3_bits;
      res["r4_bits"] = cfg.r4_bits;
      res["bits_sent_nominal"] = cfg.bits_sent_nominal;
      if (!out_path.empty()) write_file(out_path, empirical_to_csv(est.joint));
      em.emit(res);
    } else if (testset->parsed()) {
      em.command = "testset";
      if (!load_path.empty()) {
        em.inputs.push_back(load_path);
        std::string key;
        TestSetA a = load_test_set(load_path, &key);
        nlohmann::json res;
        res["content_key"] = key;
        res["K"] = a.K;
        long bits = 0;
        for (const auto& b : a.slices) bits += b.popcount();
        res["total_accepting_pairs"] = bits;
        em.emit(res);
      } else {
        if (dist_path.empty()) throw ParseError("testset needs --dist or --load");
        JointDist d = load_dist_file(dist_path, normalize);
        ProtocolOptions popt;
        popt.perturb_tolerance = rat_parse(perturb_s);
        Rat delta = rat_parse(delta_s);
        Rate r1 = parse_rate(r1_s), r2 = parse_rate(r2_s);
        ExtendedSourceOptions eopt;
        // pad so the partition grid divides K
        {
          Rat inv = Rat(1) / delta;
          Int s_z;
          mpz_sqrt(s_z.get_mpz_t(), Int(inv.get_num()).get_mpz_t());
          long s = int_to_long(s_z, "s");
          long maxmn = std::max(d.var_size("M"), d.var_size("N"));
          long pw = 1;
          while (pw < maxmn * s * s) pw *= s;
          eopt.pad_multiple = pw * s;
        }
        ExtendedSource src = build_extended_source(d, popt.perturb_tolerance, eopt);
        TestSetOptions topt;
        topt.threads = threads;
        TestSetA a = build_test_set(src, r1, r2, delta, topt);
        TestSetReport rep = verify_test_set(a, src);
        std::string key = testset_content_key(src, r1, r2, delta);
        nlohmann::json res = testset_report_json(rep);
        res["content_key"] = key;
        res["K"] = src.K;
        if (!save_path.empty()) {
          save_test_set(a, save_path, key);
          em.outputs.push_back(save_path);
        }
        em.emit(res);
      }
    } else if (lemmas->parsed()) {
      em.command = "lemmas";
      nlohmann::json res;
      std::vector<std::string> suites;
      if (suite == "all")
        suites = lemma_suite_names();
      else
        suites.push_back(suite);
      bool all_ok = true;
      for (const auto& s : suites) {
        SuiteReport rep = run_lemma_suite(s, seed, count);
        res[s] = {{"count", rep.count}, {"failures", rep.failures}, {"ok", rep.ok()}};
        if (!rep.failure_dumps.empty()) res[s]["dumps"] = rep.failure_dumps;
        all_ok = all_ok && rep.ok();
        std::cerr << s << ": " << (rep.ok() ? "pass" : "FAIL") << " (" << rep.count
                  << " instances)\n";
      }
      res["ok"] = all_ok;
      em.emit(res);
    } else if (hardsw->parsed()) {
      em.command = "hardsw";
      HardInstance h = build_hard_instance(big_n, rat_parse(heps_s));
      nlohmann::json res;
      res["N"] = h.big_n;
      res["x_size"] = h.x_size;
      res["delta"] = rat_str(h.delta);
      res["h_x_given_z"] = hard_instance_cond_entropy(h);
      res["protocols"] = nlohmann::json::array();
      for (auto& p : builtin_oneway_protocols(h)) {
        OneWayEval ev = evaluate_oneway(p, h);
        nlohmann::json pj;
        pj["expected_cost"] = rat_str(ev.expected_cost);
        pj["error"] = rat_str(ev.error);
        if (ev.error <= h.eps) {
          ReductionResult rr = reduction_extract(p, h);
          pj["r0"] = rr.r0;
          pj["z0"] = rr.z0;
          pj["cost_bound"] = rr.cost_bound;
          pj["chain_step1"] = rr.chain_step1;
          pj["chain_step2"] = rr.chain_step2;
          pj["derived_cost_bound_holds"] = rr.derived_cost_bound_holds;
        }
        res["protocols"].push_back(pj);
      }
      em.emit(res);
    } else if (cex->parsed()) {
      em.command = "counterexample";
      Rat eps = rat_parse(ceps_s);
      Rat alpha = alpha_s.empty() ? alpha_from_eps(eps) : rat_parse(alpha_s);
      CounterexampleInstance inst = build_counterexample(alpha, cex_size);
      CounterexampleReport rep = verify_counterexample(inst, eps);
      nlohmann::json res;
      res["alpha"] = rat_double(alpha);
      res["size"] = cex_size;
      res["h_mn"] = rep.h_mn;
      res["c_prime"] = rep.c_prime;
      res["ratio"] = rep.ratio;
      res["seven_sqrt_eps"] = 7 * std::sqrt(rat_double(eps));
      res["ok"] = rep.ok;
      res["h_bound_ok"] = rep.h_bound_ok;
      res["c_bound_ok"] = rep.c_bound_ok;
      res["mass_total"] = rat_str(rep.mass_total);
      res["p_mn"] = nlohmann::json::array();
      for (const auto& v : inst.p_mn) res["p_mn"].push_back(rat_str(v));
      em.emit(res);
    } else if (rrand->parsed()) {
      em.command = "reduce-rand";
      JointDist taskb = [&] {
        if (!dist_path.empty()) return load_dist_file(dist_path, normalize);
        // built-in 2-bit instance: correlated (X,Z) with a noisy message kernel
        JointDist xz({{"X", 2}, {"Z", 2}}, {Rat(3, 8), Rat(1, 8), Rat(1, 8), Rat(3, 8)});
        return extend_with_kernel(xz, "X", "M",
                                  {{Rat(11, 16), Rat(5, 16)}, {Rat(3, 16), Rat(13, 16)}});
      }();
      ProtocolOptions opt;
      opt.seed = seed;
      Rat delta = rat_parse(delta_s);
      ProtocolConfig cfg = specialize_task_b(taskb, parse_rate(rr_rate_s), delta, opt);
      RandReduceResult rr = reduce_randomness(cfg, delta, rr_budget, seed);
      nlohmann::json res;
      res["l1"] = rr.l1;
      res["l2"] = rr.l2;
      res["shared_bits"] = rr.shared_bits;
      res["bits_cap"] = rr.bits_cap;
      res["tv"] = rat_str(rr.tv);
      res["tv_float"] = rat_double(rr.tv);
      res["threshold"] = rat_str(rr.threshold);
      res["ok"] = rr.ok;
      em.emit(res);
    } else if (lossy->parsed()) {
      em.command = "lossy";
      em.inputs.push_back(lossy_spec);
      std::ifstream in(lossy_spec);
      if (!in) throw ParseError("cannot read " + lossy_spec);
      nlohmann::json spec;
      in >> spec;
      JointDist d = parse_dist_json(spec.at("dist").dump(), normalize);
      auto read_kernel = [&](const char* key) {
        std::vector<std::vector<Rat>> k;
        for (const auto& row : spec.at(key)) {
          k.emplace_back();
          for (const auto& v : row) k.back().push_back(rat_parse(v.get<std::string>()));
        }
        return k;
      };
      auto mk = read_kernel("m_kernel");
      auto nk = read_kernel("n_kernel");
      int nn = int(nk[0].size()), nz = d.var_size("Z");
      // decode table row-major over (m, n, z)
      std::vector<std::pair<int, int>> dec_table;
      for (const auto& cell : spec.at("decode"))
        dec_table.push_back({cell[0].get<int>(), cell[1].get<int>()});
      auto decode = [dec_table, nn, nz](int m, int n, int z) {
        return dec_table.at((size_t(m) * nn + n) * nz + z);
      };
      // distortion table indexed (x,y,xh,yh)
      int nx = d.var_size("X"), ny = d.var_size("Y");
      int nxh = spec.at("xh_size").get<int>(), nyh = spec.at("yh_size").get<int>();
      std::vector<Rat> dist_table;
      for (const auto& v : spec.at("distortion")) dist_table.push_back(rat_parse(v.get<std::string>()));
      if (dist_table.size() != size_t(nx) * ny * nxh * nyh)
        throw ParseError("distortion table size mismatch");
      auto dmeasure = [dist_table, ny, nxh, nyh](int x, int y, int xh, int yh) {
        return dist_table[((size_t(x) * ny + y) * nxh + xh) * nyh + yh];
      };
      ProtocolOptions opt;
      opt.seed = seed;
      LossyResult lr = lossy_achieve(
          d, mk, nk, decode, dmeasure, rat_parse(spec.at("k").get<std::string>()),
          parse_rate(spec.at("r1").get<std::string>()), parse_rate(spec.at("r2").get<std::string>()),
          rat_parse(spec.at("delta").get<std::string>()),
          rat_parse(spec.at("delta_prime").get<std::string>()), spec.at("trials").get<uint64_t>(),
          opt);
      nlohmann::json res;
      res["ideal_exceed"] = rat_str(lr.ideal_exceed);
      res["protocol_exceed"] = lr.protocol_exceed;
      res["bound"] = lr.bound;
      res["ratio_event_mass_value"] = rat_str(lr.ratio_event_mass_value);
      res["trials"] = lr.trials;
      res["fallback_count"] = lr.fallback_count;
      em.emit(res);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 4;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
