#include "oneshot/json_io.hpp"

#include <fstream>
#include <sstream>

namespace oneshot {

JointDist parse_dist_json(const std::string& text, bool normalize) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad JSON: ") + e.what());
  }
  if (!j.contains("vars") || !j.contains("probs")) throw ParseError("need 'vars' and 'probs'");
  std::vector<Var> vars;
  for (const auto& v : j["vars"]) {
    if (!v.contains("name") || !v.contains("size")) throw ParseError("var needs name and size");
    vars.push_back({v["name"].get<std::string>(), v["size"].get<int>()});
  }
  std::vector<Rat> probs;
  for (const auto& p : j["probs"]) {
    if (p.is_string())
      probs.push_back(rat_parse(p.get<std::string>()));
    else if (p.is_number_integer())
      probs.push_back(Rat(p.get<long>()));
    else if (p.is_number_float())
      probs.push_back(rat_from_double(p.get<double>()));
    else
      throw ParseError("probability entries must be rational strings or numbers");
  }
  Rat sum = 0;
  for (const auto& p : probs) sum += p;
  if (sum != 1) {
    if (!normalize || sgn(sum) <= 0)
      throw ParseError("probabilities sum to " + rat_str(sum) +
                       " (pass --normalize to rescale)");
    for (auto& p : probs) p /= sum;
  }
  try {
    return JointDist(std::move(vars), std::move(probs));
  } catch (const PreconditionError& e) {
    throw ParseError(e.what());
  }
}

JointDist load_dist_file(const std::string& path, bool normalize) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dist_json(ss.str(), normalize);
}

nlohmann::json dist_to_json(const JointDist& d) {
  nlohmann::json j;
  j["vars"] = nlohmann::json::array();
  for (const auto& v : d.vars()) j["vars"].push_back({{"name", v.name}, {"size", v.size}});
  j["probs"] = nlohmann::json::array();
  for (const auto& p : d.probs()) j["probs"].push_back(rat_str(p));
  return j;
}

nlohmann::json region_report_json(const RegionReport& rep) {
  nlohmann::json j;
  switch (rep.kind) {
    case RegionKind::oneshot: j["kind"] = "oneshot"; break;
    case RegionKind::cmi: j["kind"] = "cmi"; break;
    case RegionKind::prior: j["kind"] = "prior"; break;
  }
  j["r1"] = rep.r1;
  j["r2"] = rep.r2;
  j["good_mass"] = rat_str(rep.good_mass);
  j["good_mass_float"] = rat_double(rep.good_mass);
  j["satisfied"] = rep.satisfied;
  j["slack_terms"] = rep.slack_terms;
  return j;
}

nlohmann::json testset_report_json(const TestSetReport& rep) {
  nlohmann::json j;
  auto put = [&](const char* k, const Rat& v) {
    j[k] = rat_str(v);
    j[std::string(k) + "_float"] = rat_double(v);
  };
  put("eps_used", rep.eps_used);
  put("true_mass", rep.true_mass);
  put("cross_me_t", rep.cross_me_t);
  put("cross_s_nf", rep.cross_s_nf);
  put("product_mass", rep.product_mass);
  put("bound_true", rep.bound_true);
  put("bound_cross_me_t", rep.bound_cross_me_t);
  put("bound_cross_s_nf", rep.bound_cross_s_nf);
  put("bound_product", rep.bound_product);
  put("claim_good_mass", rep.claim_good_mass);
  put("claim_good_bound", rep.claim_good_bound);
  put("max_region1_mass", rep.max_region1_mass);
  put("max_bad_mass", rep.max_bad_mass);
  j["a1_card_ok"] = rep.a1_card_ok;
  j["ok"] = rep.ok;
  return j;
}

nlohmann::json estimate_json(const ErrorEstimate& est) {
  nlohmann::json j;
  j["tv_estimate"] = est.tv_estimate;
  j["ci95"] = {est.ci_lo, est.ci_hi};
  j["trials"] = est.joint.trials;
  j["seed"] = est.joint.seed;
  j["fallback_count"] = est.fallback_count;
  j["zero_weight_count"] = est.zero_weight_count;
  j["avg_scan"] = est.avg_scan;
  j["agreement_mismatch"] = est.agreement_mismatch;
  j["bound_8delta"] = est.bound_8delta;
  j["bound_10delta"] = est.bound_10delta;
  return j;
}

nlohmann::json trial_json(const TrialOutcome& o) {
  nlohmann::json j;
  j["x"] = o.x;
  j["y"] = o.y;
  j["z"] = o.z;
  j["j1"] = o.j1;
  j["j2"] = o.j2;
  j["jp1"] = o.jp1;
  j["jp2"] = o.jp2;
  j["m_out"] = o.m_out;
  j["n_out"] = o.n_out;
  j["fallback"] = o.fallback;
  j["scan_len"] = o.scan_len;
  j["bits_sent"] = o.bits_sent;
  return j;
}

std::string empirical_to_csv(const EmpiricalJoint& joint) {
  std::ostringstream out;
  out << "x,y,z,m,n,count\n";
  std::vector<size_t> strides(joint.vars.size(), 1);
  for (int i = int(joint.vars.size()) - 2; i >= 0; --i)
    strides[i] = strides[i + 1] * size_t(joint.vars[i + 1].size);
  for (size_t r = 0; r < joint.counts.size(); ++r) {
    if (!joint.counts[r]) continue;
    size_t rem = r;
    for (size_t i = 0; i < strides.size(); ++i) {
      out << (rem / strides[i]);
      out << ',';
      rem %= strides[i];
    }
    out << joint.counts[r] << "\n";
  }
  return out.str();
}

uint64_t file_fnv1a(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

nlohmann::json run_manifest(const std::string& command, const std::vector<std::string>& args,
                            uint64_t seed, const std::vector<std::string>& input_files,
                            double wall_seconds, const std::vector<std::string>& output_paths) {
  nlohmann::json j;
  j["command"] = command;
  j["arguments"] = args;
  j["seed"] = seed;
  j["version"] = "0.1.0";
  j["inputs"] = nlohmann::json::array();
  for (const auto& f : input_files) {
    char buf[32];
    snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)file_fnv1a(f));
    j["inputs"].push_back({{"path", f}, {"fnv1a", buf}});
  }
  j["wall_seconds"] = wall_seconds;
  j["outputs"] = output_paths;
  return j;
}

}  // namespace oneshot
