#include <cmath>

#include "doctest.h"
#include "oneshot/batteries.hpp"
#include "oneshot/experiments.hpp"
#include "oneshot/info.hpp"

using namespace oneshot;

namespace {

// independent CMI oracle straight from the definition, for cross-checks:
// I(A;B|C) = sum p(a,b,c) log2( p(a,b,c) p(c) / (p(a,c) p(b,c)) )
double cmi_oracle(const JointDist& d, const std::string& a, const std::string& b,
                  const std::string& c) {
  JointDist j = d.marginal({a, b, c});
  JointDist pac = d.marginal({a, c});
  JointDist pbc = d.marginal({b, c});
  JointDist pc = d.marginal({c});
  int nb = d.var_size(b), nc = d.var_size(c);
  double s = 0;
  j.for_each_support([&](const std::vector<int>& idx, const Rat& p) {
    Rat ratio = p * pc.probs()[idx[2]] /
                (pac.probs()[size_t(idx[0]) * nc + idx[2]] * pbc.probs()[size_t(idx[1]) * nc + idx[2]]);
    s += rat_double(p) * rat_log2(ratio);
  });
  (void)nb;
  return s;
}

}  // namespace

TEST_CASE("entropy basics") {
  JointDist u = JointDist::uniform({{"X", 16}});
  CHECK(entropy_bits(u, {"X"}) == doctest::Approx(4));
  JointDist x({{"X", 2}}, {Rat(1, 3), Rat(2, 3)});
  JointDist m({{"M", 4}}, {Rat(1, 4), Rat(1, 4), Rat(1, 4), Rat(1, 4)});
  JointDist xm = JointDist::product(x, m);
  CHECK(cond_mutual_info_bits(xm, {"X"}, {"M"}, {}) == doctest::Approx(0));
}

TEST_CASE("hard-source conditional entropy matches the closed form") {
  HardInstance h = build_hard_instance(16, Rat(1, 64));
  CHECK(hard_instance_cond_entropy(h) == doctest::Approx(std::log2(14.0) / 8).epsilon(1e-12));
  CHECK(cond_entropy_bits(h.dist, {"X"}, {"Z"}) ==
        doctest::Approx(std::log2(14.0) / 8).epsilon(1e-12));
}

TEST_CASE("d_s basics and conventions") {
  JointDist u = JointDist::uniform({{"X", 8}});
  for (int e = 0; e <= 4; ++e) {
    SpectrumValue v = d_s({u, u, Rat(e, 4)});
    CHECK(v.bits == doctest::Approx(0));
  }
  JointDist pm = JointDist::point_mass({{"X", 8}}, {5});
  SpectrumValue v = d_s({pm, u, Rat(1, 2)});
  CHECK(v.bits == doctest::Approx(3));
  // eps = 1: the minimum breakpoint
  JointDist two({{"X", 2}}, {Rat(1, 4), Rat(3, 4)});
  SpectrumValue vmin = d_s({two, u.marginal({"X"}).arity() ? two : two, Rat(1)});
  // num = den = two, all ratios are 1
  CHECK(vmin.bits == doctest::Approx(0));
  // support escape
  SpectrumValue vinf = d_s({u, pm, Rat(1, 4)});
  CHECK(vinf.infinite);
}

TEST_CASE("d_h basics") {
  JointDist u = JointDist::uniform({{"X", 4}});
  CHECK(d_h({u, u, Rat(1, 8)}).bits == doctest::Approx(0));
  // two-point numerator against uniform: large eps picks the larger ratio
  JointDist num({{"X", 4}}, {Rat(9, 10), Rat(1, 10), 0, 0});
  // ratios: 3.6 (mass .9), 0.4 (mass .1)
  SpectrumValue lo = d_h({num, u, Rat(1, 100)});
  CHECK(lo.pow2 == Rat(2, 5));
  SpectrumValue hi = d_h({num, u, Rat(1, 5)});
  CHECK(hi.pow2 == Rat(18, 5));
  JointDist pm = JointDist::point_mass({{"X", 4}}, {2});
  CHECK(d_h({pm, pm, Rat(1, 3)}).bits == doctest::Approx(0));
}

TEST_CASE("spectrum step monotonicity") {
  RngStream rng(17);
  for (int it = 0; it < 40; ++it) {
    JointDist a = random_dist(rng, {{"X", 5}});
    JointDist b = random_dist(rng, {{"X", 5}});
    SpectrumQuery q{a, b, Rat(0)};
    double prev_s = 1e300, prev_h = -1e300;
    bool escaped = false;
    for (int e = 0; e <= 10; ++e) {
      q.epsilon = Rat(e, 10);
      SpectrumValue vs = d_s(q);
      SpectrumValue vh = d_h(q);
      if (vs.infinite) {
        escaped = true;
        break;
      }
      CHECK(vs.bits <= prev_s + 1e-12);
      CHECK(vh.bits >= prev_h - 1e-12);
      prev_s = vs.bits;
      prev_h = vh.bits;
    }
    (void)escaped;
  }
}

TEST_CASE("region_oneshot trivial and relabeling") {
  // constants M, N: every ratio is 1, so generous rates give mass 1
  JointDist base = JointDist::uniform({{"X", 2}, {"Y", 2}, {"Z", 1}});
  JointDist with_m = extend_with_kernel(base, "X", "M", {{Rat(1)}, {Rat(1)}});
  JointDist d = extend_with_kernel(with_m, "Y", "N", {{Rat(1)}, {Rat(1)}});
  RegionReport rep = region_oneshot(d, Rate::from_bits(6), Rate::from_bits(6), Rat(1, 4), Rat(1, 20));
  CHECK(rep.good_mass == 1);
  CHECK(rep.satisfied);

  // relabeling symbols leaves the event mass unchanged
  RngStream rng(23);
  JointDist t = random_task_joint(rng, 2, 2, 2, 2, 2);
  Rat mass = ratio_event_mass(t, Rate::from_bits(3), Rate::from_bits(3), Rat(1, 4));
  // swap the two symbols of X, M simultaneously via pushforward
  JointDist relab = t.pushforward("X", {1, 0}, 2).pushforward("M", {1, 0}, 2);
  Rat mass2 = ratio_event_mass(relab, Rate::from_bits(3), Rate::from_bits(3), Rat(1, 4));
  CHECK(mass == mass2);
}

TEST_CASE("zero rates leave real mass outside the event") {
  RngStream rng(61);
  JointDist t = random_task_joint(rng, 2, 2, 1, 2, 2, 16, true);
  Rat mass = ratio_event_mass(t, Rate::from_bits(0), Rate::from_bits(0), Rat(1, 4));
  CHECK(mass < 1);
}

TEST_CASE("DSC specialization reproduces the inverse-probability event") {
  // with M = X, N = Y and trivial Z the three ratios collapse to
  // 1/p_{X|Y}, 1/p_{Y|X} and 1/p_{XY}; enumerate that event directly
  JointDist xy({{"X", 2}, {"Y", 2}}, {Rat(1, 2), Rat(1, 4), Rat(1, 8), Rat(1, 8)});
  JointDist task = make_task_joint_dsc(xy);
  JointDist px = xy.marginal({"X"});
  JointDist py = xy.marginal({"Y"});
  for (int r1 = 1; r1 <= 5; ++r1)
    for (int r2 = 1; r2 <= 5; ++r2) {
      Rat delta(1, 4);
      Rat dev = dev_term(2, 2, delta);
      Rat t1 = delta * rat_pow2(r1), t2 = delta * rat_pow2(r2);
      Rat t3 = delta * delta * delta * delta * rat_pow2(r1 + r2) / dev;
      Rat direct = 0;
      xy.for_each_support([&](const std::vector<int>& idx, const Rat& p) {
        Rat p_x_given_y = p / py.probs()[idx[1]];
        Rat p_y_given_x = p / px.probs()[idx[0]];
        if (Rat(1) / p_x_given_y <= t1 && Rat(1) / p_y_given_x <= t2 && Rat(1) / p <= t3)
          direct += p;
      });
      CHECK(ratio_event_mass(task, Rate::from_bits(r1), Rate::from_bits(r2), delta) == direct);
    }
}

TEST_CASE("region_oneshot rejects Markov violations") {
  // N depends on X directly: N-Y-XZM fails
  JointDist base = JointDist::uniform({{"X", 2}, {"Y", 2}, {"Z", 1}});
  JointDist with_m = extend_with_kernel(base, "X", "M", {{Rat(1, 2), Rat(1, 2)}, {Rat(1, 4), Rat(3, 4)}});
  JointDist bad = extend_with_kernel(with_m, "X", "N", {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
  CHECK_THROWS_AS(region_oneshot(bad, Rate::from_bits(2), Rate::from_bits(2), Rat(1, 4), Rat(1, 10)),
                  PreconditionError);
}

TEST_CASE("region_cmi thresholds") {
  // fully independent: all three thresholds vanish
  JointDist base = JointDist::uniform({{"X", 2}, {"Y", 2}, {"Z", 2}});
  JointDist with_m = extend_with_kernel(base, "X", "M", {{Rat(1, 2), Rat(1, 2)}, {Rat(1, 2), Rat(1, 2)}});
  JointDist ind = extend_with_kernel(with_m, "Y", "N", {{Rat(1, 2), Rat(1, 2)}, {Rat(1, 2), Rat(1, 2)}});
  RegionReport rep = region_cmi(ind, Rat(1, 4));
  CHECK(rep.slack_terms["cmi_x_m_nz"] == doctest::Approx(0).epsilon(1e-9));
  CHECK(rep.slack_terms["cmi_y_n_mz"] == doctest::Approx(0).epsilon(1e-9));
  CHECK(rep.slack_terms["cmi_xy_mn_z"] == doctest::Approx(0).epsilon(1e-9));

  // M = X uniform 1-bit, N and Z trivial: thresholds (1, 0, 1)
  JointDist b2 = JointDist::uniform({{"X", 2}, {"Y", 1}, {"Z", 1}});
  JointDist m2 = extend_with_kernel(b2, "X", "M", {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
  JointDist d2 = extend_with_kernel(m2, "Y", "N", {{Rat(1)}});
  RegionReport r2 = region_cmi(d2, Rat(1, 4));
  CHECK(r2.slack_terms["cmi_x_m_nz"] == doctest::Approx(1));
  CHECK(r2.slack_terms["cmi_y_n_mz"] == doctest::Approx(0));
  CHECK(r2.slack_terms["cmi_xy_mn_z"] == doctest::Approx(1));

  // random instance cross-checked against the definition oracle
  RngStream rng(31);
  for (int it = 0; it < 10; ++it) {
    JointDist t = random_task_joint(rng, 2, 2, 2, 2, 2);
    double i1 = cond_mutual_info_bits(t, {"X"}, {"M"}, {"N", "Z"});
    // oracle needs single variables; fold (N,Z) is covered by other cases,
    // so check I(X;M|Z) style quantities instead
    double o = cmi_oracle(t, "X", "M", "Z");
    CHECK(cond_mutual_info_bits(t, {"X"}, {"M"}, {"Z"}) == doctest::Approx(o).epsilon(1e-9));
    (void)i1;
  }
}

TEST_CASE("substate-style tail bound from the CMI proof") {
  RngStream rng(37);
  for (int it = 0; it < 20; ++it) {
    JointDist t = random_task_joint(rng, 2, 2, 2, 2, 2);
    double i1 = cond_mutual_info_bits(t, {"X"}, {"M"}, {"N", "Z"});
    for (Rat dp : {Rat(1, 4), Rat(1, 8)}) {
      double r = std::max(i1, 1e-9);
      double exponent = (r / rat_double(dp) + 1) / rat_double(dp);
      Rat thresh = rat_exp2(exponent);
      Rat mass = event_mass_ratio_conditions(t, &thresh, nullptr, nullptr);
      CHECK(mass >= Rat(1) - 2 * dp);
    }
  }
}

TEST_CASE("prior-region comparison: trivial epsilon") {
  RngStream rng(41);
  JointDist t = random_task_joint(rng, 2, 2, 1, 2, 2);
  JointDist s = t.marginal({"M"});
  JointDist tt = t.marginal({"N"});
  // eps's near 1 make the target mass trivially negative
  RegionReport rep = region_compare_prior(t, s, tt, Rat(9, 10), Rat(9, 10), Rat(9, 10), Rat(1, 4),
                                        Rate::from_bits(1), Rate::from_bits(1));
  CHECK(rep.satisfied);
}

TEST_CASE("prior-region containment on random instances") {
  RngStream rng(43);
  int checked = 0;
  for (int it = 0; it < 25; ++it) {
    JointDist t = random_task_joint(rng, 2, 2, 1, 2, 2);
    JointDist s = t.marginal({"M"});
    JointDist tt = t.marginal({"N"});
    Rat e1(1, 10), e2(1, 10), e3(1, 10), delta(1, 4);
    PriorRegionCorner corner = prior_region_corner(t, s, tt, e1, e2, e3, delta);
    if (!corner.finite) continue;
    RegionReport rep = region_compare_prior(t, s, tt, e1, e2, e3, delta, corner.r1, corner.r2);
    CHECK(rep.slack_terms["in_prior_region"] == 1.0);
    CHECK(rep.satisfied);
    ++checked;
  }
  CHECK(checked > 10);
}
