#include "oneshot/batteries.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "oneshot/coding.hpp"
#include "oneshot/extended.hpp"
#include "oneshot/info.hpp"
#include "oneshot/json_io.hpp"
#include "oneshot/protocol.hpp"
#include "oneshot/testset.hpp"

namespace oneshot {

JointDist random_dist(RngStream& rng, std::vector<Var> vars, long max_weight) {
  size_t total = 1;
  for (const auto& v : vars) total *= size_t(v.size);
  std::vector<long> weights(total);
  long sum = 0;
  for (auto& w : weights) {
    w = long(rng.below(uint64_t(max_weight)));  // zeros allowed
    sum += w;
  }
  if (sum == 0) {
    weights[rng.below(total)] = 1;
    sum = 1;
  }
  std::vector<Rat> probs;
  probs.reserve(total);
  for (long w : weights) probs.emplace_back(w, static_cast<unsigned long>(sum));
  return JointDist(std::move(vars), std::move(probs));
}

std::vector<std::vector<Rat>> random_kernel(RngStream& rng, int rows, int cols, long K,
                                            bool distinct) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<std::vector<Rat>> kernel(rows, std::vector<Rat>(cols));
    std::set<long> used;
    bool good = true;
    for (int r = 0; r < rows && good; ++r) {
      // positive integer weights summing to K
      std::vector<long> w(cols, 1);
      long rem = K - cols;
      if (rem < 0) throw PreconditionError("K too small for kernel row");
      for (int c = 0; c < cols - 1; ++c) {
        long take = long(rng.below(uint64_t(rem + 1)));
        w[c] += take;
        rem -= take;
      }
      w[cols - 1] += rem;
      for (int c = 0; c < cols && good; ++c) {
        if (distinct && !used.insert(w[c]).second) good = false;
        kernel[r][c] = Rat(w[c], static_cast<unsigned long>(K));
        kernel[r][c].canonicalize();
      }
    }
    if (good) return kernel;
  }
  throw PreconditionError("could not sample a distinct kernel");
}

JointDist random_task_joint(RngStream& rng, int nx, int ny, int nz, int nm, int nn,
                            long kernel_den, bool distinct_weights) {
  JointDist base = random_dist(rng, {{"X", nx}, {"Y", ny}, {"Z", nz}});
  auto mk = random_kernel(rng, nx, nm, kernel_den, distinct_weights);
  auto nk = random_kernel(rng, ny, nn, kernel_den, distinct_weights);
  JointDist with_m = extend_with_kernel(base, "X", "M", mk);
  return extend_with_kernel(with_m, "Y", "N", nk);
}

namespace {

EventSet random_event(RngStream& rng, const JointDist& d) {
  // choose a nonempty variable subset and a nonempty member set
  EventSet g;
  for (const auto& v : d.vars())
    if (rng.below(2)) g.vars.push_back(v.name);
  if (g.vars.empty()) g.vars.push_back(d.vars()[rng.below(d.vars().size())].name);
  size_t total = 1;
  for (const auto& n : g.vars) total *= size_t(d.var_size(n));
  for (size_t r = 0; r < total; ++r) {
    if (!rng.below(2)) continue;
    std::vector<int> member;
    size_t rem = r;
    for (size_t i = g.vars.size(); i-- > 0;) {
      member.insert(member.begin(), int(rem % size_t(d.var_size(g.vars[i]))));
      rem /= size_t(d.var_size(g.vars[i]));
    }
    g.members.insert(member);
  }
  return g;
}

std::string dump_instance(const JointDist& d, const std::string& extra = "") {
  nlohmann::json j = dist_to_json(d);
  if (!extra.empty()) j["params"] = extra;
  return j.dump();
}

using Case = std::function<bool(RngStream&, std::string&)>;

SuiteReport drive(const std::string& name, uint64_t seed, int count, const Case& one) {
  SuiteReport rep;
  rep.suite = name;
  rep.count = count;
  for (int i = 0; i < count; ++i) {
    RngStream rng(seed, uint64_t(i));
    std::string dump;
    bool ok = false;
    try {
      ok = one(rng, dump);
    } catch (const std::exception& e) {
      dump += std::string(" exception: ") + e.what();
    }
    if (!ok) {
      rep.failures++;
      if (rep.failure_dumps.size() < 8) rep.failure_dumps.push_back(dump);
    }
  }
  return rep;
}

std::vector<Var> random_small_schema(RngStream& rng, int max_vars = 3, int max_size = 4) {
  static const char* names[] = {"A", "B", "C", "D"};
  int nv = 1 + int(rng.below(uint64_t(max_vars)));
  std::vector<Var> vars;
  for (int i = 0; i < nv; ++i) vars.push_back({names[i], 2 + int(rng.below(uint64_t(max_size - 1)))});
  return vars;
}

bool case_restriction(RngStream& rng, std::string& dump) {
  JointDist d = random_dist(rng, random_small_schema(rng));
  EventSet g = random_event(rng, d);
  Rat pg = d.mass(g);
  if (sgn(pg) == 0) return true;  // resample-equivalent: nothing to check
  JointDist r = d.restrict(g);
  bool ok = tv_half(d, r) == Rat(1) - pg;
  if (!ok) dump = dump_instance(d, "restriction");
  return ok;
}

bool case_monotone(RngStream& rng, std::string& dump) {
  auto vars = random_small_schema(rng);
  JointDist d1 = random_dist(rng, vars);
  JointDist d2 = random_dist(rng, vars);
  // random map on a random variable
  int vi = int(rng.below(vars.size()));
  int old_size = vars[vi].size;
  int new_size = 1 + int(rng.below(uint64_t(old_size)));
  std::vector<int> f(old_size);
  for (auto& t : f) t = int(rng.below(uint64_t(new_size)));
  JointDist f1 = d1.pushforward(vars[vi].name, f, new_size);
  JointDist f2 = d2.pushforward(vars[vi].name, f, new_size);
  bool ok = tv_half(f1, f2) <= tv_half(d1, d2);
  // KL monotonicity under marginalization
  if (vars.size() > 1) {
    std::vector<std::string> keep;
    for (size_t i = 0; i + 1 < vars.size(); ++i) keep.push_back(vars[i].name);
    double kl_joint = kl_bits(d1, d2);
    double kl_marg = kl_bits(d1.marginal(keep), d2.marginal(keep));
    if (std::isfinite(kl_joint))
      ok = ok && kl_marg <= kl_joint + 1e-9;
    else
      ok = ok && true;  // +inf dominates everything
  }
  if (!ok) dump = dump_instance(d1, "monotone");
  return ok;
}

bool case_pinsker(RngStream& rng, std::string& dump) {
  auto vars = random_small_schema(rng);
  JointDist d1 = random_dist(rng, vars);
  JointDist d2 = random_dist(rng, vars);
  double kl = kl_bits(d1, d2);
  if (!std::isfinite(kl)) return true;
  double l1 = rat_double(l1_dist(d1, d2));
  bool ok = l1 * l1 <= 4 * kl + 1e-9;
  if (!ok) dump = dump_instance(d1, "pinsker");
  return ok;
}

bool case_convexsplit(RngStream& rng, std::string& dump) {
  int nx = 2 + int(rng.below(2));
  int nm = 2 + int(rng.below(3));
  JointDist xm = random_dist(rng, {{"X", nx}, {"M", nm}});
  // W mixes the M-marginal with uniform so the hypothesis is satisfiable
  JointDist pm = xm.marginal({"M"});
  std::vector<Rat> wp(nm);
  for (int m = 0; m < nm; ++m) wp[m] = (pm.probs()[m] + Rat(1, static_cast<unsigned long>(nm))) / 2;
  JointDist w({{"M", nm}}, wp);
  // eps = strict tail mass above ratio 1, which makes d_s^eps <= 0 and the
  // hypothesis hold at R = 2 log(3/delta) with delta = 3/4.
  JointDist px = xm.marginal({"X"});
  Rat eps = 0;
  xm.for_each_support([&](const std::vector<int>& idx, const Rat& p) {
    if (p > px.probs()[idx[0]] * wp[idx[1]]) eps += p;
  });
  if (eps > Rat(3, 4)) return true;  // vacuous region, skip
  Rat delta(3, 4);
  SpectrumValue ds = d_s({xm, JointDist::product(px, w), eps});
  const int R = 4;  // = 2 log2(3 / (3/4))
  if (ds.infinite || ds.bits > R - 4) return true;  // hypothesis fails, nothing to assert
  Rat tv = convex_split_tv_exact(xm, w, R);
  bool ok = tv <= eps + delta;
  if (!ok) dump = dump_instance(xm, "convexsplit R=" + std::to_string(R));
  return ok;
}

bool case_bipartite(RngStream& rng, std::string& dump) {
  JointDist xmn = random_dist(rng, {{"X", 2}, {"M", 2}, {"N", 2}});
  JointDist pu = xmn.marginal({"M"});
  JointDist pv = xmn.marginal({"N"});
  std::vector<Rat> up(2), vp(2);
  for (int i = 0; i < 2; ++i) {
    up[i] = (pu.probs()[i] + Rat(1, 2)) / 2;
    vp[i] = (pv.probs()[i] + Rat(1, 2)) / 2;
  }
  JointDist u({{"M", 2}}, up), v({{"N", 2}}, vp);
  Rat delta(3, 4);
  // rates large enough that the joint-ratio event usually has real mass;
  // two-symbol alphabets keep the type enumeration quadratic
  int R1 = 8, R2 = 8;
  Rat t1 = delta * delta / 24 * rat_pow2(R1);
  Rat t2 = delta * delta / 24 * rat_pow2(R2);
  Rat t3 = delta * delta / 24 * rat_pow2(R1 + R2);
  Rat good = 0;
  JointDist px = xmn.marginal({"X"});
  xmn.for_each_support([&](const std::vector<int>& idx, const Rat& p) {
    int x = idx[0], m = idx[1], n = idx[2];
    Rat pxm = 0, pxn = 0;
    for (int nn2 = 0; nn2 < 2; ++nn2) pxm += xmn.probs()[(size_t(x) * 2 + m) * 2 + nn2];
    for (int mm2 = 0; mm2 < 2; ++mm2) pxn += xmn.probs()[(size_t(x) * 2 + mm2) * 2 + n];
    Rat r1 = pxm / (px.probs()[x] * up[m]);
    Rat r2 = pxn / (px.probs()[x] * vp[n]);
    Rat r3 = p / (px.probs()[x] * up[m] * vp[n]);
    if (r1 <= t1 && r2 <= t2 && r3 <= t3) good += p;
  });
  Rat eps = Rat(1) - good;
  Rat tv = bipartite_convex_split_tv_exact(xmn, u, v, R1, R2, 1L << 22);
  bool ok = tv <= eps + delta;
  if (!ok) dump = dump_instance(xmn, "bipartite");
  return ok;
}

bool case_posdecode(RngStream& rng, std::string& dump) {
  int c = 1 + int(rng.below(5));
  int nh = 2 + int(rng.below(7));
  // joint CH with support of C exactly [c]
  std::vector<Rat> probs(size_t(c + 1) * nh, Rat(0));
  long total = 0;
  std::vector<long> w(size_t(c) * nh);
  for (auto& t : w) {
    t = long(rng.below(8));
    total += t;
  }
  if (total == 0) {
    w[0] = 1;
    total = 1;
  }
  for (int i = 0; i < c; ++i) {
    long row = 0;
    for (int h = 0; h < nh; ++h) row += w[size_t(i) * nh + h];
    if (row == 0) {
      w[size_t(i) * nh + int(rng.below(uint64_t(nh)))] = 1;
      ++total;
    }
  }
  for (int i = 0; i < c; ++i)
    for (int h = 0; h < nh; ++h)
      probs[size_t(i) * nh + h] = Rat(w[size_t(i) * nh + h], static_cast<unsigned long>(total));
  JointDist ch({{"C", c + 1}, {"H", nh}}, probs);
  std::vector<EventSet> tests(c);
  for (int i = 0; i < c; ++i) {
    tests[i].vars = {"H"};
    for (int h = 0; h < nh; ++h)
      if (rng.below(2)) tests[i].members.insert({h});
  }
  auto rep = sequential_decode_error_exact(ch, tests);
  bool ok = rep.tv <= rep.bound;
  if (!ok) dump = dump_instance(ch, "posdecode");
  return ok;
}

bool case_tail1d(RngStream& rng, std::string& dump) {
  int K = 8;
  std::vector<Rat> probs(size_t(K) * K, Rat(0));
  long total = 0;
  std::vector<long> w(size_t(K) * K, 0);
  for (int e = 0; e < K; ++e)
    for (int g = e; g < K; ++g) {
      w[size_t(e) * K + g] = long(rng.below(8));
      total += w[size_t(e) * K + g];
    }
  if (total == 0) {
    w[0] = 1;
    total = 1;
  }
  for (int e = 0; e < K; ++e)
    for (int g = 0; g < K; ++g)
      probs[size_t(e) * K + g] = Rat(w[size_t(e) * K + g], static_cast<unsigned long>(total));
  JointDist eg({{"E", K}, {"G", K}}, probs);
  bool ok = tail_dominance_check(eg);
  if (!ok) dump = dump_instance(eg, "tail1d");
  return ok;
}

bool case_set_a(RngStream& rng, std::string& dump) {
  int nz = 1 + int(rng.below(2));
  JointDist d = random_task_joint(rng, 2, 2, nz, 2, 2, 16, true);
  ExtendedSourceOptions eopt;
  eopt.pad_multiple = 16;  // s = 2, max(|M|,|N|) = 2 -> c = 3
  ExtendedSource src = build_extended_source(d, Rat(1, 64), eopt);
  Rate r1 = Rate::from_bits(3 + double(rng.below(3)));
  Rate r2 = Rate::from_bits(3 + double(rng.below(3)));
  TestSetA a = build_test_set(src, r1, r2, Rat(1, 4));
  TestSetReport rep = verify_test_set(a, src);
  if (!rep.ok) dump = dump_instance(d, "setA");
  return rep.ok;
}

bool case_sch(RngStream& rng, std::string& dump) {
  int ny = 2 + int(rng.below(2));
  int nx = 2 + int(rng.below(3));
  JointDist d = random_dist(rng, {{"Y", ny}, {"X", nx}, {"Xp", nx}});
  auto res = sch_equivalence_check(d);
  if (!res.ok) dump = dump_instance(d, "sch");
  return res.ok;
}

}  // namespace

const std::vector<std::string>& lemma_suite_names() {
  static const std::vector<std::string> names = {"restriction", "monotone", "pinsker",
                                                 "convexsplit", "bipartite", "posdecode",
                                                 "tail1d",      "setA",     "sch"};
  return names;
}

SuiteReport run_lemma_suite(const std::string& name, uint64_t seed, int count) {
  if (name == "restriction") return drive(name, seed, count, case_restriction);
  if (name == "monotone") return drive(name, seed, count, case_monotone);
  if (name == "pinsker") return drive(name, seed, count, case_pinsker);
  if (name == "convexsplit") return drive(name, seed, count, case_convexsplit);
  if (name == "bipartite") return drive(name, seed, count, case_bipartite);
  if (name == "posdecode") return drive(name, seed, count, case_posdecode);
  if (name == "tail1d" || name == "lemma1") return drive("tail1d", seed, count, case_tail1d);
  if (name == "setA") return drive(name, seed, count, case_set_a);
  if (name == "sch") return drive(name, seed, count, case_sch);
  throw PreconditionError("unknown suite " + name);
}

}  // namespace oneshot
