// Python bindings for the main operations: exact distributions, entropic and
// spectrum quantities, region reports, the protocol simulator, and the
// experiment drivers. Rationals cross the boundary as "n/d" strings so
// exactness survives the trip.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oneshot/batteries.hpp"
#include "oneshot/coding.hpp"
#include "oneshot/experiments.hpp"
#include "oneshot/info.hpp"
#include "oneshot/json_io.hpp"
#include "oneshot/protocol.hpp"

namespace py = pybind11;
using namespace oneshot;

namespace {

JointDist dist_from_lists(const std::vector<std::pair<std::string, int>>& vars,
                          const std::vector<std::string>& probs) {
  std::vector<Var> vs;
  for (const auto& [name, size] : vars) vs.push_back({name, size});
  std::vector<Rat> ps;
  for (const auto& p : probs) ps.push_back(rat_parse(p));
  return JointDist(std::move(vs), std::move(ps));
}

std::vector<std::string> probs_as_strings(const JointDist& d) {
  std::vector<std::string> out;
  out.reserve(d.tensor_size());
  for (const auto& p : d.probs()) out.push_back(rat_str(p));
  return out;
}

}  // namespace

PYBIND11_MODULE(_oneshotmc, m) {
  m.doc() = "one-shot multi-party message compression toolkit";

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<PreconditionError>(m, "PreconditionError");
  py::register_exception<BudgetError>(m, "BudgetError");

  py::class_<JointDist>(m, "JointDist")
      .def(py::init(&dist_from_lists), py::arg("vars"), py::arg("probs"))
      .def_static("from_json", [](const std::string& text, bool normalize) {
        return parse_dist_json(text, normalize);
      }, py::arg("text"), py::arg("normalize") = false)
      .def("to_json", [](const JointDist& d) { return dist_to_json(d).dump(); })
      .def("vars", [](const JointDist& d) {
        std::vector<std::pair<std::string, int>> out;
        for (const auto& v : d.vars()) out.push_back({v.name, v.size});
        return out;
      })
      .def("probs", &probs_as_strings)
      .def("marginal", &JointDist::marginal)
      .def("condition", [](const JointDist& d, const std::map<std::string, int>& given) {
        Assignment a;
        a.values = given;
        return d.condition(a);
      })
      .def("pushforward", &JointDist::pushforward)
      .def("is_markov", &JointDist::is_markov);

  m.def("tv_half", [](const JointDist& a, const JointDist& b) { return rat_str(tv_half(a, b)); });
  m.def("tv_half_float",
        [](const JointDist& a, const JointDist& b) { return rat_double(tv_half(a, b)); });
  m.def("kl_bits", &kl_bits);
  m.def("entropy_bits", &entropy_bits);
  m.def("cond_entropy_bits", &cond_entropy_bits);
  m.def("cond_mutual_info_bits", &cond_mutual_info_bits);

  m.def("d_s_bits", [](const JointDist& num, const JointDist& den, const std::string& eps) {
    return d_s({num, den, rat_parse(eps)}).bits;
  });
  m.def("d_h_bits", [](const JointDist& num, const JointDist& den, const std::string& eps) {
    return d_h({num, den, rat_parse(eps)}).bits;
  });

  m.def("region_oneshot", [](const JointDist& d, double r1, double r2, const std::string& delta,
                             const std::string& eps) {
    RegionReport rep =
        region_oneshot(d, Rate::from_bits(r1), Rate::from_bits(r2), rat_parse(delta), rat_parse(eps));
    return region_report_json(rep).dump();
  });
  m.def("region_cmi", [](const JointDist& d, const std::string& delta) {
    return region_report_json(region_cmi(d, rat_parse(delta))).dump();
  });

  m.def("convex_split_tv", [](const JointDist& xm, const JointDist& w, int R) {
    return rat_str(convex_split_tv_exact(xm, w, R));
  });

  m.def("simulate",
        [](const JointDist& d, double r1, double r2, const std::string& delta, uint64_t trials,
           uint64_t seed, int threads) {
          ProtocolOptions opt;
          opt.seed = seed;
          ProtocolConfig cfg =
              make_protocol_config(d, Rate::from_bits(r1), Rate::from_bits(r2), rat_parse(delta), opt);
          ErrorEstimate est = estimate_error(cfg, trials, threads);
          nlohmann::json j = estimate_json(est);
          j["eps_design"] = rat_str(cfg.eps_design);
          j["K"] = cfg.src.K;
          return j.dump();
        },
        py::arg("dist"), py::arg("r1"), py::arg("r2"), py::arg("delta"), py::arg("trials"),
        py::arg("seed") = 1, py::arg("threads") = 1);

  m.def("verify_test_set", [](const JointDist& d, double r1, double r2, const std::string& delta_s) {
    Rat delta = rat_parse(delta_s);
    ExtendedSourceOptions eopt;
    long s = 2, maxmn = std::max(d.var_size("M"), d.var_size("N")), pw = 1;
    Rat inv = Rat(1) / delta;
    Int s_z;
    mpz_sqrt(s_z.get_mpz_t(), Int(inv.get_num()).get_mpz_t());
    s = int_to_long(s_z, "s");
    while (pw < maxmn * s * s) pw *= s;
    eopt.pad_multiple = pw * s;
    ExtendedSource src = build_extended_source(d, Rat(1, 64), eopt);
    TestSetA a = build_test_set(src, Rate::from_bits(r1), Rate::from_bits(r2), delta);
    return testset_report_json(verify_test_set(a, src)).dump();
  });

  m.def("hard_instance_entropy", [](long n, const std::string& eps) {
    return hard_instance_cond_entropy(build_hard_instance(n, rat_parse(eps)));
  });
  m.def("counterexample", [](const std::string& eps_s, long size) {
    Rat eps = rat_parse(eps_s);
    CounterexampleInstance inst = build_counterexample(alpha_from_eps(eps), size);
    CounterexampleReport rep = verify_counterexample(inst, eps);
    py::dict out;
    out["h_mn"] = rep.h_mn;
    out["c_prime"] = rep.c_prime;
    out["ratio"] = rep.ratio;
    out["ok"] = rep.ok;
    return out;
  });
  m.def("sch_check", [](const JointDist& d) {
    SchResult r = sch_equivalence_check(d);
    py::dict out;
    out["pr_mismatch"] = rat_str(r.pr_mismatch);
    out["tv_to_ideal"] = rat_str(r.tv_to_ideal);
    out["ok"] = r.ok;
    return out;
  });
  m.def("run_lemma_suite", [](const std::string& name, uint64_t seed, int count) {
    SuiteReport rep = run_lemma_suite(name, seed, count);
    py::dict out;
    out["suite"] = rep.suite;
    out["count"] = rep.count;
    out["failures"] = rep.failures;
    return out;
  });
}
