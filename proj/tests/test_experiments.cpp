#include <cmath>

#include "doctest.h"
#include "oneshot/batteries.hpp"
#include "oneshot/experiments.hpp"
#include "oneshot/info.hpp"

using namespace oneshot;

TEST_CASE("hard instance structure") {
  HardInstance h = build_hard_instance(64, Rat(1, 64));
  CHECK(h.delta == Rat(1, 8));
  CHECK(h.x_size == 56);
  // X marginal is exactly uniform
  JointDist px = h.dist.marginal({"X"});
  for (const auto& p : px.probs()) CHECK(p == Rat(1, 56));
  // Z is uniform and the diagonal columns are deterministic
  JointDist pz = h.dist.marginal({"Z"});
  for (const auto& p : pz.probs()) CHECK(p == Rat(1, 64));
  CHECK(hard_instance_cond_entropy(h) == doctest::Approx(std::log2(56.0) / 8).epsilon(1e-12));
  CHECK(cond_entropy_bits(h.dist, {"X"}, {"Z"}) ==
        doctest::Approx(std::log2(56.0) / 8).epsilon(1e-12));
  CHECK_THROWS_AS(build_hard_instance(64, Rat(1, 3)), PreconditionError);   // not a square
  CHECK_THROWS_AS(build_hard_instance(63, Rat(1, 64)), PreconditionError);  // delta N fractional
  // degenerate single mixing column is still valid
  HardInstance tiny = build_hard_instance(16, Rat(1, 256));
  CHECK(tiny.x_size == 15);
}

TEST_CASE("one-way protocol evaluation") {
  HardInstance h = build_hard_instance(64, Rat(1, 64));
  auto protos = builtin_oneway_protocols(h);
  REQUIRE(protos.size() == 6);
  // verbatim: six bits, zero error
  OneWayEval ev = evaluate_oneway(protos[0], h);
  CHECK(ev.expected_cost == 6);
  CHECK(ev.error == 0);

  // decoder ignores the message and outputs the diagonal guess
  OneWayProtocol ignore = protos[0];
  long delta_n = 8;
  ignore.dec = [delta_n](const std::string&, int z, int) {
    return int(z >= delta_n ? z - delta_n : 0);
  };
  OneWayEval ev2 = evaluate_oneway(ignore, h);
  // wrong exactly on mixing columns when x != 0
  CHECK(ev2.error == Rat(1, 8) * Rat(55, 56));

  // empty-message protocol: zero cost, same error
  OneWayProtocol empty = ignore;
  for (auto& code : empty.enc[0]) code = "";
  OneWayEval ev3 = evaluate_oneway(empty, h);
  CHECK(ev3.expected_cost == 0);
  CHECK(ev3.error == Rat(1, 8) * Rat(55, 56));

  // prefix violations are rejected
  OneWayProtocol bad = protos[0];
  bad.enc[0][1] = bad.enc[0][0] + "01";
  CHECK_THROWS_AS(evaluate_oneway(bad, h), PreconditionError);
}

TEST_CASE("reduction extraction on the battery") {
  HardInstance h = build_hard_instance(64, Rat(1, 64));
  for (auto& p : builtin_oneway_protocols(h)) {
    OneWayEval ev = evaluate_oneway(p, h);
    REQUIRE(ev.error <= h.eps);
    ReductionResult rr = reduction_extract(p, h);
    CHECK(rr.r0 >= 0);
    CHECK(rr.z0 >= 0);
    CHECK(rr.z0 < 8);
    CHECK(rr.chain_step1);
    CHECK(rr.chain_step2);
    CHECK(rr.derived_cost_bound_holds);
  }
  // a protocol that misses the error target is a precondition failure
  HardInstance h2 = build_hard_instance(64, Rat(1, 256));
  OneWayProtocol lossy = builtin_oneway_protocols(h2)[5];
  OneWayEval ev = evaluate_oneway(lossy, h2);
  if (ev.error > h2.eps) CHECK_THROWS_AS(reduction_extract(lossy, h2), PreconditionError);
}

TEST_CASE("counterexample: class route equals brute force on small alphabets") {
  for (long q : {8L, 16L}) {
    Rat alpha(3, 4);
    CounterexampleInstance inst = build_counterexample(alpha, q);
    REQUIRE(inst.dist.has_value());
    // mass accounting
    Rat total = 0;
    for (const auto& row : inst.spectrum) total += row.mass;
    CHECK(total == 1);
    // p_MN classes against the materialized tensor
    JointDist pmn = inst.dist->marginal({"M", "N"});
    CHECK(pmn.probs()[0] == inst.p_mn[0]);                       // (0,0) i.e. m=n=1
    CHECK(pmn.probs()[1] == inst.p_mn[1]);                       // (0,1)
    CHECK(pmn.probs()[size_t(1) * q] == inst.p_mn[2]);           // (1,0)
    CHECK(pmn.probs()[size_t(1) * q + 1] == inst.p_mn[3]);       // diagonal
    CHECK(pmn.probs()[size_t(1) * q + 2] == inst.p_mn[4]);       // off-diagonal
    // H(MN) from classes equals the tensor entropy
    double h_direct = entropy_bits(*inst.dist, {"M", "N"});
    CounterexampleReport rep = verify_counterexample(inst, Rat(1, 16));
    CHECK(rep.h_mn == doctest::Approx(h_direct).epsilon(1e-12));
    // quantile from classes equals the brute-force quantile
    std::vector<std::pair<Rat, Rat>> brute;
    JointDist px = inst.dist->marginal({"X"});
    inst.dist->for_each_support([&](const std::vector<int>& idx, const Rat& p) {
      int x = idx[0], m = idx[1], n = idx[2];
      Rat km = (m == x) ? inst.alpha : (Rat(1) - inst.alpha) / Rat(q - 1);
      Rat kn = (n == x) ? inst.alpha : (Rat(1) - inst.alpha) / Rat(q - 1);
      brute.emplace_back(Rat(km * kn / pmn.probs()[size_t(m) * q + n]), p);
      (void)px;
    });
    std::sort(brute.begin(), brute.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Rat cum = 0, target = Rat(1) - Rat(1, 16);
    Rat quant = brute.back().first;
    for (auto& [ratio, mass] : brute) {
      cum += mass;
      if (cum >= target) {
        quant = ratio;
        break;
      }
    }
    CHECK(rep.c_prime == doctest::Approx(rat_log2(quant)).epsilon(1e-12));
  }
}

TEST_CASE("alpha solver lands on the large branch") {
  for (Rat eps : {Rat(1, 64), Rat(1, 256)}) {
    Rat a = alpha_from_eps(eps);
    double e = rat_double(eps);
    double val = rat_double(a) * std::pow(1 - rat_double(a), 2);
    CHECK(val == doctest::Approx(2 * e).epsilon(1e-9));
    CHECK(1 - rat_double(a) <= std::sqrt(4 * e) + 1e-9);
  }
}

TEST_CASE("counterexample bounds at full size") {
  // eps = 1/256: every stated bound holds
  {
    Rat eps(1, 256);
    CounterexampleInstance inst = build_counterexample(alpha_from_eps(eps), 1 << 12);
    CounterexampleReport rep = verify_counterexample(inst, eps);
    CHECK(rep.mass_total == 1);
    CHECK(rep.ok);
    CHECK(rep.h_bound_ok);
    CHECK(rep.c_bound_ok);
  }
  // eps = 1/64: the headline ratio and the c' bound hold exactly, but the
  // intermediate entropy bound does not: the off-diagonal class occupies
  // ~|X|^2 cells, so H(MN) carries a 2 log|X| term the (1-a^3) log|X| + 3
  // expression cannot absorb once |X| is large (exact value 8.9721 vs 8.7938).
  {
    Rat eps(1, 64);
    CounterexampleInstance inst = build_counterexample(alpha_from_eps(eps), 1 << 12);
    CounterexampleReport rep = verify_counterexample(inst, eps);
    CHECK(rep.mass_total == 1);
    CHECK(rep.ok);
    CHECK(rep.c_bound_ok);
    CHECK_FALSE(rep.h_bound_ok);
    CHECK(rep.h_mn == doctest::Approx(8.9721).epsilon(1e-4));
  }
}

TEST_CASE("corner scheme costs") {
  RngStream rng(51);
  JointDist d = random_task_joint(rng, 2, 2, 2, 2, 2, 16, true);
  Rat delta(1, 4), eps(1, 20);
  CornerSchemeResult full = interactive_corner_scheme(d, Rat(1, 2), delta, eps);
  CornerSchemeResult nf = interactive_corner_scheme(d, Rat(1), delta, eps);
  CornerSchemeResult mf = interactive_corner_scheme(d, Rat(0), delta, eps);
  CHECK(nf.expected_bits == doctest::Approx(nf.cost_n_first + 2));
  CHECK(mf.expected_bits == doctest::Approx(mf.cost_m_first + 2));
  CHECK(full.expected_bits ==
        doctest::Approx(0.5 * full.cost_n_first + 0.5 * full.cost_m_first + 2));

  // constants cost nothing but the feedback bits
  JointDist base = JointDist::uniform({{"X", 2}, {"Y", 2}, {"Z", 1}});
  JointDist with_m = extend_with_kernel(base, "X", "M", {{Rat(1)}, {Rat(1)}});
  JointDist consts = extend_with_kernel(with_m, "Y", "N", {{Rat(1)}, {Rat(1)}});
  CornerSchemeResult c = interactive_corner_scheme(consts, Rat(1, 2), delta, eps);
  CHECK(c.expected_bits == doctest::Approx(2));
}

TEST_CASE("randomness reduction: constant message needs a single candidate") {
  JointDist xz({{"X", 2}, {"Z", 2}}, {Rat(3, 8), Rat(1, 8), Rat(1, 8), Rat(3, 8)});
  JointDist taskb = extend_with_kernel(xz, "X", "M", {{Rat(1)}, {Rat(1)}});
  ProtocolOptions opt;
  opt.seed = 3;
  ProtocolConfig cfg = specialize_task_b(taskb, Rate::from_pow2(Rat(256) * 3), Rat(1, 4), opt);
  RandReduceResult rr = reduce_randomness(cfg, Rat(1, 4), 64, 3);
  CHECK(rr.ok);
  CHECK(rr.l1 == 1);
  CHECK(rr.shared_bits == 0);
  // a degenerate reduction delta makes the threshold vacuous
  RandReduceResult loose = reduce_randomness(cfg, Rat(1), 64, 3);
  CHECK(loose.ok);
  CHECK(loose.threshold >= 1);
}
