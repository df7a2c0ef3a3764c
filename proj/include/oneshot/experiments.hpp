#pragma once
// Constructions and numerical claims: the hard source separating one-way
// from interactive expected communication (with the protocol reduction),
// the interactive corner-point scheme, the full-support counterexample for
// the naive hypothesis test, and shared-randomness reduction.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oneshot/protocol.hpp"

namespace oneshot {

// ---- hard source and one-way protocols --------------------------------------

struct HardInstance {
  long big_n = 0;   // N
  Rat eps;          // < 1/64
  Rat delta;        // sqrt(eps), exact rational
  long x_size = 0;  // (1-delta) N
  JointDist dist;   // over X (size (1-delta)N) and Z (size N)
};

// Z uniform on [N]; mixing columns z < delta N carry a uniform X, the rest
// are the shifted diagonal. Requires delta N integral and eps < 1/64.
HardInstance build_hard_instance(long big_n, const Rat& eps);

// Closed form delta * log2((1-delta) N).
double hard_instance_cond_entropy(const HardInstance& h);

struct OneWayProtocol {
  std::vector<Rat> p_r;                          // randomness distribution
  std::vector<std::vector<std::string>> enc;     // [r][x] -> bitstring ('0'/'1')
  std::function<int(const std::string&, int, int)> dec;  // (message, z, r) -> x
};

// Prefix-freeness per randomness value; throws on violation.
void check_prefix_free(const OneWayProtocol& p);

struct OneWayEval {
  Rat expected_cost;  // bits
  Rat error;          // Pr[decoded != x]
};
OneWayEval evaluate_oneway(const OneWayProtocol& p, const HardInstance& h);

struct ReductionResult {
  int r0 = -1, z0 = -1;
  Rat cost_r0, err_r0, err_z0;
  bool chain_step1 = false;   // 3C >= log2((1-3 sqrt(eps))(1-delta)N)
  bool chain_step2 = false;   // log2((1-3 sqrt(eps))(1-delta)N) >= (1/2) log2 N
  double cost_bound = 0;      // H(X|Z) / (6 sqrt(eps))
  bool derived_cost_bound_holds = false;
};

// The extraction behind the lower bound: fixes r0 by a Markov search, then a
// mixing column z0, and checks the final cost chain. Precondition: the
// protocol's error on h is at most h.eps.
ReductionResult reduction_extract(const OneWayProtocol& p, const HardInstance& h);

// Built-in protocol battery for the CLI driver (verbatim sender first).
std::vector<OneWayProtocol> builtin_oneway_protocols(const HardInstance& h);

// ---- interactive corner scheme ----------------------------------------------

struct CornerSchemeResult {
  double cost_n_first = 0;  // bits: send N with side Z, then M with side NZ
  double cost_m_first = 0;
  int feedback_bits = 2;
  double expected_bits = 0;  // p * n_first + (1-p) * m_first + feedback
};

// Expected banked cost of the mixture scheme at mixing weight p, using the
// one-sender subroutine's worst-case message length. Constant variables are
// skipped (a constant needs no message).
CornerSchemeResult interactive_corner_scheme(const JointDist& d_xyzmn, const Rat& p_mix,
                                             const Rat& delta, const Rat& eps);

// Minimal banked Task-B cost (bits) of sending `msg` held as `source`'s
// message with the listed side variables at the receiver; 0 for constants.
int taskb_banked_bits(const JointDist& d, const std::string& source, const std::string& msg,
                      const std::vector<std::string>& side, const Rat& delta, const Rat& eps);

// ---- counterexample ----------------------------------------------------------

struct CounterexampleInstance {
  Rat alpha;
  long size = 0;  // |X|
  // p_MN classes: (1,1), (1,n), (m,1), diagonal m=n!=1, off-diagonal
  std::array<Rat, 5> p_mn;
  std::array<Rat, 5> class_counts;
  // exact spectrum of the full-support ratio, merged breakpoints
  struct ClassRow {
    Rat ratio;
    Rat mass;
  };
  std::vector<ClassRow> spectrum;
  // materialized only for small sizes (cross-check against the class path)
  std::optional<JointDist> dist;  // over X, M, N
};

// Solves alpha(1-alpha)^2 = 2 eps on the branch 1 - alpha <= sqrt(4 eps).
Rat alpha_from_eps(const Rat& eps);

CounterexampleInstance build_counterexample(const Rat& alpha, long size);

struct CounterexampleReport {
  double h_mn = 0;
  double c_prime = 0;  // (1-eps)-quantile of the log-ratio spectrum
  double ratio = 0;    // h_mn / c_prime
  bool ok = false;             // ratio <= 7 sqrt(eps)
  bool h_bound_ok = false;     // h_mn <= (1-alpha^3) log2|X| + 3
  bool c_bound_ok = false;     // c_prime >= log2|X| - 3
  Rat mass_total;              // spectrum masses, must be exactly 1
};
CounterexampleReport verify_counterexample(const CounterexampleInstance& inst, const Rat& eps);

// ---- shared-randomness reduction ---------------------------------------------

struct RandReduceResult {
  long l1 = 0, l2 = 0;     // candidate list sizes actually used
  int shared_bits = 0;     // ceil(log2 l1) + ceil(log2 l2)
  int bits_cap = 0;        // 2 * ceil(log2(24 |M||N| / delta^3))
  Rat tv;                  // exact mixture distance to the ideal joint
  Rat threshold;           // eps_design + 2 delta
  bool ok = false;
  uint64_t seed = 0;
};

// Replaces the protocol's shared randomness by uniform indices into sampled
// candidate tuples, growing the lists until the exact mixture distance meets
// eps_design + 2 delta or the budget runs out (best attempt returned).
// Requires unit scan blocks (block exponents 0), which makes the exact
// per-candidate output distribution a counting problem.
RandReduceResult reduce_randomness(const ProtocolConfig& cfg, const Rat& delta, int search_budget,
                                   uint64_t seed);

}  // namespace oneshot
