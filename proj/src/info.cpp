#include "oneshot/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oneshot {

double entropy_bits(const JointDist& d, const std::vector<std::string>& vars) {
  JointDist m = d.marginal(vars);
  double h = 0;
  for (const auto& p : m.probs()) {
    if (sgn(p) == 0) continue;
    h -= rat_double(p) * rat_log2(p);
  }
  return h;
}

double cond_entropy_bits(const JointDist& d, const std::vector<std::string>& vars,
                         const std::vector<std::string>& given) {
  if (given.empty()) return entropy_bits(d, vars);
  std::vector<std::string> both(vars);
  both.insert(both.end(), given.begin(), given.end());
  return entropy_bits(d, both) - entropy_bits(d, given);
}

double cond_mutual_info_bits(const JointDist& d, const std::vector<std::string>& a,
                             const std::vector<std::string>& b, const std::vector<std::string>& c) {
  std::set<std::string> seen;
  for (const auto* grp : {&a, &b, &c})
    for (const auto& n : *grp)
      if (!seen.insert(n).second) throw PreconditionError("overlapping variable groups: " + n);
  std::vector<std::string> ac(a), bc(b), abc(a);
  ac.insert(ac.end(), c.begin(), c.end());
  bc.insert(bc.end(), c.begin(), c.end());
  abc.insert(abc.end(), b.begin(), b.end());
  abc.insert(abc.end(), c.begin(), c.end());
  double h_ac = entropy_bits(d, ac);
  double h_bc = entropy_bits(d, bc);
  double h_abc = entropy_bits(d, abc);
  double h_c = c.empty() ? 0.0 : entropy_bits(d, c);
  return h_ac + h_bc - h_abc - h_c;
}

namespace {

// (ratio, mass) breakpoints of the likelihood spectrum over supp(num),
// sorted ascending and merged. Returns false if num escapes supp(den).
bool spectrum_breakpoints(const SpectrumQuery& q, std::vector<std::pair<Rat, Rat>>& out) {
  if (!q.num.same_schema(q.den)) throw PreconditionError("spectrum query schema mismatch");
  if (q.epsilon < 0 || q.epsilon > 1) throw PreconditionError("epsilon out of range");
  std::vector<std::pair<Rat, Rat>> pts;
  for (size_t r = 0; r < q.num.probs().size(); ++r) {
    const Rat& pn = q.num.probs()[r];
    if (sgn(pn) == 0) continue;
    const Rat& pd = q.den.probs()[r];
    if (sgn(pd) == 0) return false;
    pts.emplace_back(Rat(pn / pd), pn);
  }
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  out.clear();
  for (auto& [ratio, mass] : pts) {
    if (!out.empty() && out.back().first == ratio)
      out.back().second += mass;
    else
      out.emplace_back(ratio, mass);
  }
  return true;
}

SpectrumValue infinite_value() {
  SpectrumValue v;
  v.infinite = true;
  v.bits = std::numeric_limits<double>::infinity();
  return v;
}

}  // namespace

SpectrumValue d_s(const SpectrumQuery& q) {
  std::vector<std::pair<Rat, Rat>> bp;
  if (!spectrum_breakpoints(q, bp)) return infinite_value();
  if (bp.empty()) throw PreconditionError("empty numerator support");
  // strict tail above breakpoint i, scanning from the top
  Rat tail = 0;
  size_t pick = bp.size() - 1;
  for (size_t i = bp.size(); i-- > 0;) {
    if (tail <= q.epsilon) pick = i;  // breakpoint i has strict tail `tail`
    else break;
    tail += bp[i].second;
  }
  SpectrumValue v;
  v.pow2 = bp[pick].first;
  v.bits = rat_log2(v.pow2);
  return v;
}

SpectrumValue d_h(const SpectrumQuery& q) {
  std::vector<std::pair<Rat, Rat>> bp;
  if (!spectrum_breakpoints(q, bp)) return infinite_value();
  if (bp.empty()) throw PreconditionError("empty numerator support");
  Rat target = Rat(1) - q.epsilon;
  // non-strict tail at breakpoint i; pick the largest i with tail >= 1-eps
  Rat tail = 0;
  size_t pick = 0;
  for (size_t i = bp.size(); i-- > 0;) {
    tail += bp[i].second;
    if (tail >= target) { pick = i; break; }
  }
  SpectrumValue v;
  v.pow2 = bp[pick].first;
  v.bits = rat_log2(v.pow2);
  return v;
}

void require_task_markov(const JointDist& d) {
  if (!d.is_markov({"M"}, {"X"}, {"Y", "Z", "N"}))
    throw PreconditionError("Markov condition M-X-YZN fails");
  if (!d.is_markov({"N"}, {"Y"}, {"X", "Z", "M"}))
    throw PreconditionError("Markov condition N-Y-XZM fails");
}

Rat dev_term(int m_size, int n_size, const Rat& delta) {
  Rat arg = Rat(std::max(m_size, n_size)) / delta;
  return rat_from_double(rat_log2(arg));
}

namespace {

struct TaskMarginals {
  JointDist joint;  // canonical order X,Y,Z,M,N
  JointDist p_x, p_y, p_z, p_xm, p_yn, p_nz, p_mz, p_mnz;

  explicit TaskMarginals(const JointDist& d)
      : joint(d.marginal({"X", "Y", "Z", "M", "N"})),
        p_x(d.marginal({"X"})),
        p_y(d.marginal({"Y"})),
        p_z(d.marginal({"Z"})),
        p_xm(d.marginal({"X", "M"})),
        p_yn(d.marginal({"Y", "N"})),
        p_nz(d.marginal({"N", "Z"})),
        p_mz(d.marginal({"M", "Z"})),
        p_mnz(d.marginal({"M", "N", "Z"})) {}
};

}  // namespace

// Shared evaluator for the three-ratio events; null thresholds are skipped.
static Rat three_ratio_event_mass(const JointDist& d, const Rat* t1, const Rat* t2, const Rat* t3) {
  TaskMarginals tm(d);
  const int nz = tm.p_z.vars()[0].size;
  const int nm = tm.joint.vars()[3].size;
  const int nn = tm.joint.vars()[4].size;
  Rat good = 0;
  tm.joint.for_each_support([&](const std::vector<int>& idx, const Rat& p) {
    int x = idx[0], y = idx[1], z = idx[2], m = idx[3], n = idx[4];
    // conditionals are well-defined on support points
    Rat pm_x = tm.p_xm.probs()[size_t(x) * nm + m] / tm.p_x.probs()[x];
    Rat pn_y = tm.p_yn.probs()[size_t(y) * nn + n] / tm.p_y.probs()[y];
    Rat pmnz = tm.p_mnz.probs()[(size_t(m) * nn + n) * nz + z];
    if (t1) {
      Rat pm_nz = pmnz / tm.p_nz.probs()[size_t(n) * nz + z];
      if (pm_x > *t1 * pm_nz) return;
    }
    if (t2) {
      Rat pn_mz = pmnz / tm.p_mz.probs()[size_t(m) * nz + z];
      if (pn_y > *t2 * pn_mz) return;
    }
    if (t3) {
      Rat pmn_z = pmnz / tm.p_z.probs()[z];
      if (pm_x * pn_y > *t3 * pmn_z) return;
    }
    good += p;
  });
  return good;
}

Rat ratio_event_mass(const JointDist& d, const Rate& r1, const Rate& r2, const Rat& delta) {
  Rat t1 = delta * r1.pow2;
  Rat t2 = delta * r2.pow2;
  Rat d4 = delta * delta * delta * delta;
  Rat t3 = d4 * r1.pow2 * r2.pow2 / dev_term(d.var_size("M"), d.var_size("N"), delta);
  return three_ratio_event_mass(d, &t1, &t2, &t3);
}

RegionReport region_oneshot(const JointDist& d, const Rate& r1, const Rate& r2, const Rat& delta,
                            const Rat& eps) {
  require_task_markov(d);
  RegionReport rep;
  rep.kind = RegionKind::oneshot;
  rep.r1 = r1.bits;
  rep.r2 = r2.bits;
  rep.good_mass = ratio_event_mass(d, r1, r2, delta);
  rep.satisfied = rep.good_mass >= Rat(1) - eps;
  Rat dev = dev_term(d.var_size("M"), d.var_size("N"), delta);
  rep.slack_terms["delta"] = rat_double(delta);
  rep.slack_terms["dev"] = rat_double(dev);
  rep.slack_terms["log_log_term"] = rat_log2(dev);
  rep.slack_terms["three_log_inv_delta"] = 3 * rat_log2(Rat(1) / delta);
  rep.slack_terms["threshold1"] = rat_double(delta * r1.pow2);
  rep.slack_terms["threshold2"] = rat_double(delta * r2.pow2);
  rep.slack_terms["threshold3"] =
      rat_double(delta * delta * delta * delta * r1.pow2 * r2.pow2 / dev);
  return rep;
}

RegionReport region_cmi(const JointDist& d, const Rat& delta, std::optional<double> query_r1,
                        std::optional<double> query_r2) {
  require_task_markov(d);
  double i1 = cond_mutual_info_bits(d, {"X"}, {"M"}, {"N", "Z"});
  double i2 = cond_mutual_info_bits(d, {"Y"}, {"N"}, {"M", "Z"});
  double i3 = cond_mutual_info_bits(d, {"X", "Y"}, {"M", "N"}, {"Z"});
  double dd = rat_double(delta);
  double loglog = rat_log2(dev_term(d.var_size("M"), d.var_size("N"), delta));
  auto inflate = [&](double r) { return 16.0 * r / (dd * dd) + 10.0 / dd + loglog; };
  RegionReport rep;
  rep.kind = RegionKind::cmi;
  rep.r1 = inflate(i1);
  rep.r2 = inflate(i2);
  rep.good_mass = 1;
  rep.slack_terms["cmi_x_m_nz"] = i1;
  rep.slack_terms["cmi_y_n_mz"] = i2;
  rep.slack_terms["cmi_xy_mn_z"] = i3;
  rep.slack_terms["inflated_sum_rate"] = inflate(i3);
  rep.slack_terms["log_log_term"] = loglog;
  rep.satisfied = true;
  if (query_r1 && query_r2) {
    const double tol = 1e-12;
    rep.satisfied = (*query_r1 >= i1 - tol) && (*query_r2 >= i2 - tol) &&
                    (*query_r1 + *query_r2 >= i3 - tol);
  }
  return rep;
}

PriorRegionCorner prior_region_corner(const JointDist& d, const JointDist& s_dist, const JointDist& t_dist,
                     const Rat& eps1, const Rat& eps2, const Rat& eps3, const Rat& delta) {
  if (s_dist.arity() != 1 || s_dist.vars()[0].name != "M" || s_dist.vars()[0].size != d.var_size("M"))
    throw PreconditionError("auxiliary S must be a single variable named M over the M alphabet");
  if (t_dist.arity() != 1 || t_dist.vars()[0].name != "N" || t_dist.vars()[0].size != d.var_size("N"))
    throw PreconditionError("auxiliary T must be a single variable named N over the N alphabet");
  PriorRegionCorner c;
  c.k1 = d_s({d.marginal({"X", "M"}), JointDist::product(d.marginal({"X"}), s_dist), delta});
  c.k2 = d_h({d.marginal({"M", "N", "Z"}),
              JointDist::product(s_dist, d.marginal({"N", "Z"})), eps1});
  c.k3 = d_s({d.marginal({"Y", "N"}), JointDist::product(d.marginal({"Y"}), t_dist), delta});
  c.k4 = d_h({d.marginal({"M", "Z", "N"}),
              JointDist::product(d.marginal({"M", "Z"}), t_dist), eps2});
  c.k5 = d_h({d.marginal({"M", "N", "Z"}),
              JointDist::product(JointDist::product(s_dist, t_dist), d.marginal({"Z"})), eps3});
  if (c.k1.infinite || c.k3.infinite) {
    c.finite = false;
    return c;
  }
  // d_h values are finite whenever the numerator support is inside the
  // denominator's; if not, the region is empty.
  if (c.k2.infinite || c.k4.infinite || c.k5.infinite) {
    c.finite = false;
    return c;
  }
  Rat f4 = Rat(3) / delta;
  f4 = f4 * f4 * f4 * f4;           // (3/delta)^4
  Rat f6 = f4 * (Rat(3) / delta) * (Rat(3) / delta);
  Rat p1 = c.k1.pow2 / c.k2.pow2 * f4;
  Rat p2_ind = c.k3.pow2 / c.k4.pow2 * f4;
  Rat p_sum = c.k1.pow2 * c.k3.pow2 / c.k5.pow2 * f6;
  Rat p2_from_sum = p_sum / p1;
  Rat p2 = std::max(p2_ind, p2_from_sum);
  c.r1 = Rate::from_pow2(p1);
  c.r2 = Rate::from_pow2(p2);
  return c;
}

RegionReport region_compare_prior(const JointDist& d, const JointDist& s_dist, const JointDist& t_dist,
                                const Rat& eps1, const Rat& eps2, const Rat& eps3, const Rat& delta,
                                const Rate& r1, const Rate& r2) {
  require_task_markov(d);
  PriorRegionCorner c = prior_region_corner(d, s_dist, t_dist, eps1, eps2, eps3, delta);
  bool in_region = false;
  if (c.finite) {
    Rat f4 = Rat(3) / delta;
    f4 = f4 * f4 * f4 * f4;
    Rat f6 = f4 * (Rat(3) / delta) * (Rat(3) / delta);
    in_region = (r1.pow2 >= c.k1.pow2 / c.k2.pow2 * f4) &&
                (r2.pow2 >= c.k3.pow2 / c.k4.pow2 * f4) &&
                (r1.pow2 * r2.pow2 >= c.k1.pow2 * c.k3.pow2 / c.k5.pow2 * f6);
  }
  Rat d4 = delta * delta * delta * delta;
  Rat d6 = d4 * delta * delta;
  Rat t1 = d4 / 81 * r1.pow2;
  Rat t2 = d4 / 81 * r2.pow2;
  Rat t3 = d6 / 729 * r1.pow2 * r2.pow2;
  Rat mass = three_ratio_event_mass(d, &t1, &t2, &t3);
  Rat target = Rat(1) - eps1 - eps2 - eps3 - 2 * delta;

  RegionReport rep;
  rep.kind = RegionKind::prior;
  rep.r1 = r1.bits;
  rep.r2 = r2.bits;
  rep.good_mass = mass;
  rep.satisfied = mass >= target;
  rep.slack_terms["k1"] = c.k1.bits;
  rep.slack_terms["k2"] = c.k2.bits;
  rep.slack_terms["k3"] = c.k3.bits;
  rep.slack_terms["k4"] = c.k4.bits;
  rep.slack_terms["k5"] = c.k5.bits;
  rep.slack_terms["four_log_3_delta"] = 4 * rat_log2(Rat(3) / delta);
  rep.slack_terms["in_prior_region"] = in_region ? 1.0 : 0.0;
  rep.slack_terms["target_mass"] = rat_double(target);
  return rep;
}

// Optional-threshold event helper used by batteries (substate check etc.).
Rat event_mass_ratio_conditions(const JointDist& d, const Rat* t1, const Rat* t2, const Rat* t3) {
  return three_ratio_event_mass(d, t1, t2, t3);
}

}  // namespace oneshot
