#pragma once
// Entropic quantities, the two information-spectrum divergences, and the
// three communication-region predicates (one-shot event, CMI thresholds,
// and the prior-work comparison region).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oneshot/dist.hpp"

namespace oneshot {

double entropy_bits(const JointDist& d, const std::vector<std::string>& vars);
double cond_entropy_bits(const JointDist& d, const std::vector<std::string>& vars,
                         const std::vector<std::string>& given);
double cond_mutual_info_bits(const JointDist& d, const std::vector<std::string>& a,
                             const std::vector<std::string>& b, const std::vector<std::string>& c);

struct SpectrumQuery {
  JointDist num;
  JointDist den;
  Rat epsilon;  // in [0,1]
};

// Result of a spectrum divergence: bits view plus the exact breakpoint 2^a.
struct SpectrumValue {
  bool infinite = false;        // num puts mass where den is zero
  Rat pow2 = 1;                 // 2^a at the selected breakpoint (when finite)
  double bits = 0.0;            // log2(pow2), or +inf
};

// Max information spectrum divergence: infimum breakpoint a (over achieved
// log-ratios) whose strict tail Pr[ratio > 2^a] is <= eps. Nonincreasing in
// eps; 0 on identical arguments; eps = 1 returns the minimum breakpoint.
SpectrumValue d_s(const SpectrumQuery& q);

// Hypothesis-testing spectrum divergence: maximum breakpoint a with
// Pr[ratio >= 2^a] >= 1 - eps. Nondecreasing in eps.
SpectrumValue d_h(const SpectrumQuery& q);

enum class RegionKind { oneshot, cmi, prior };

struct RegionReport {
  RegionKind kind = RegionKind::oneshot;
  double r1 = 0, r2 = 0;                 // rates in bits
  Rat good_mass = 0;                     // exact probability of the defining event
  bool satisfied = false;
  std::map<std::string, double> slack_terms;
};

// Rates are carried as exact 2^R values so event thresholds stay rational.
struct Rate {
  double bits = 0;
  Rat pow2 = 1;

  static Rate from_bits(double b) { return {b, rat_exp2(b)}; }
  static Rate from_pow2(const Rat& p) { return {rat_log2(p), p}; }
};

// dev = log2(max(|M|,|N|)/delta), frozen to an exact rational.
Rat dev_term(int m_size, int n_size, const Rat& delta);

// The three-ratio event of the main achievability theorem over a joint on
// variables X,Y,Z,M,N (Markov preconditions are checked):
//   p_{M|X}/p_{M|NZ} <= delta 2^{R1},  p_{N|Y}/p_{N|MZ} <= delta 2^{R2},
//   p_{M|X} p_{N|Y} / p_{MN|Z} <= delta^4 2^{R1+R2} / dev.
RegionReport region_oneshot(const JointDist& d, const Rate& r1, const Rate& r2, const Rat& delta,
                            const Rat& eps);

// Exact mass of that event alone (no report plumbing).
Rat ratio_event_mass(const JointDist& d, const Rate& r1, const Rate& r2, const Rat& delta);

// CMI thresholds I(X;M|NZ), I(Y;N|MZ), I(XY;MN|Z) and the inflated one-shot
// rates 16R/delta^2 + 10/delta + log2(dev) for the given delta. If query
// rates are supplied, `satisfied` reports membership in the CMI region.
RegionReport region_cmi(const JointDist& d, const Rat& delta,
                        std::optional<double> query_r1 = std::nullopt,
                        std::optional<double> query_r2 = std::nullopt);

// Comparison with the earlier unified achievable region: computes the five
// spectrum quantities k1..k5 against auxiliary S (over M) and T (over N),
// checks whether (r1,r2) satisfies that region, and evaluates the implied
// three-ratio event with constants delta^4/3^4 and delta^6/3^6 against
// 1 - eps1 - eps2 - eps3 - 2 delta.
RegionReport region_compare_prior(const JointDist& d, const JointDist& s_dist, const JointDist& t_dist,
                                const Rat& eps1, const Rat& eps2, const Rat& eps3, const Rat& delta,
                                const Rate& r1, const Rate& r2);

// Corner rates of the comparison region as exact pow2 values (k1-k2+4log(3/d),
// k3-k4+4log(3/d), with the sum constraint folded in by the caller if needed).
struct PriorRegionCorner {
  Rate r1, r2;
  SpectrumValue k1, k2, k3, k4, k5;
  bool finite = true;
};
PriorRegionCorner prior_region_corner(const JointDist& d, const JointDist& s_dist, const JointDist& t_dist,
                     const Rat& eps1, const Rat& eps2, const Rat& eps3, const Rat& delta);

// Markov preconditions of the main task: M-X-YZN and N-Y-XZM.
void require_task_markov(const JointDist& d);

// Exact mass of the event where the supplied ratio conditions hold on a
// task joint (X,Y,Z,M,N); null thresholds are skipped. Ratio 1 is
// p_{M|X}/p_{M|NZ}, ratio 2 is p_{N|Y}/p_{N|MZ}, ratio 3 is
// p_{M|X} p_{N|Y} / p_{MN|Z}.
Rat event_mass_ratio_conditions(const JointDist& d, const Rat* t1, const Rat* t2, const Rat* t3);

}  // namespace oneshot
