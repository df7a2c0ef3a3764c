#pragma once
// The executable two-senders-one-receiver protocol: convex-split encoders
// over lazily regenerated shared randomness, block messages, and the
// receiver's lexicographic scan over the acceptance set. Plus the DSC,
// Task B, SCH and lossy specializations.

#include <functional>
#include <memory>

#include "oneshot/testset.hpp"

namespace oneshot {

struct ProtocolOptions {
  Rat perturb_tolerance = Rat(1, 64);
  long k_cap = 1L << 40;
  long copies_cap = 1L << 26;
  TestSetOptions testset;
  uint64_t seed = 1;
};

struct ProtocolConfig {
  ExtendedSource src;
  std::shared_ptr<const TestSetA> test_set;
  std::shared_ptr<const DistSampler> xyz_sampler;
  Rate r1, r2;
  Rat delta;
  int block_exp1 = 0, block_exp2 = 0;  // log2 of the scan-window sides
  int r3_bits = 0, r4_bits = 0;        // block-index message widths
  long copies1 = 0, copies2 = 0;
  int bits_sent_nominal = 0;           // ceil(R1+3log(1/d)) + ceil(R2+3log(1/d))
  uint64_t seed = 1;
  int fallback_m = 0, fallback_n = 0;
  Rat eps_design;                      // 1 - Pr[three-ratio event]
};

ProtocolConfig make_protocol_config(const JointDist& d, const Rate& r1, const Rate& r2,
                                    const Rat& delta, const ProtocolOptions& opt = {});

struct TrialOutcome {
  int x = 0, y = 0, z = 0;
  long j1 = 0, j2 = 0;    // chosen copy indices (0-based)
  long jp1 = 0, jp2 = 0;  // signalled block indices (0-based)
  int m_out = 0, n_out = 0;
  bool fallback = false;           // no accepted pair in the scanned block
  bool alice_zero_weight = false;  // all convex-split weights vanished
  bool bob_zero_weight = false;
  long scan_len = 0;  // membership tests performed
  int bits_sent = 0;
};

TrialOutcome run_trial(const ProtocolConfig& cfg, uint64_t trial);

// Regenerates one shared copy (party 1 = Alice/S, party 2 = Bob/T); lets
// callers audit any trial's randomness without storing it.
std::pair<int, long> shared_copy(const ProtocolConfig& cfg, uint64_t trial, int party, long index);

struct EmpiricalJoint {
  std::vector<Var> vars;  // X,Y,Z,M,N
  std::vector<uint64_t> counts;
  uint64_t trials = 0;
  uint64_t seed = 0;
};

struct ErrorEstimate {
  double tv_estimate = 0;
  double ci_lo = 0, ci_hi = 0;  // bootstrap 95% interval (B = 200)
  EmpiricalJoint joint;
  uint64_t fallback_count = 0;
  uint64_t zero_weight_count = 0;
  double avg_scan = 0;
  double agreement_mismatch = 0;  // Pr[(x,y) != (m',n')], the DSC metric
  double bound_8delta = 0, bound_10delta = 0;
};

ErrorEstimate estimate_error(const ProtocolConfig& cfg, uint64_t trials, int threads = 1,
                             const std::function<void(const TrialOutcome&)>& transcript = nullptr,
                             uint64_t transcript_cap = 1000);

// ---- specializations -------------------------------------------------------

// Task joint with M = X, N = Y and trivial Z from a two-variable source.
JointDist make_task_joint_dsc(const JointDist& d_xy);
// Task joint with trivial Y, N from a (X, M, Z) source satisfying M-X-Z.
JointDist make_task_joint_taskb(const JointDist& d_xmz);

ProtocolConfig specialize_dsc(const JointDist& d_xy, const Rate& r1, const Rate& r2,
                              const Rat& delta, const ProtocolOptions& opt = {});

// Task B pins the trivial sender's rate at log2(1/delta) (the smallest value
// admitted by the second ratio condition) and reports Alice's side only.
ProtocolConfig specialize_task_b(const JointDist& d_xmz, const Rate& r, const Rat& delta,
                                 const ProtocolOptions& opt = {});

struct SchResult {
  Rat pr_mismatch;
  Rat tv_to_ideal;
  bool ok = false;
};
// Exact check that 1/2 ||YXX' - YXX||_1 <= 4 Pr[X != X'].
SchResult sch_equivalence_check(const JointDist& d_yxx);

struct LossyResult {
  Rat ideal_exceed;          // exact Pr[d(XY, f(M,N,Z)) >= k] on the ideal joint
  double protocol_exceed = 0;  // Monte Carlo estimate after running the protocol
  double bound = 0;            // ideal + delta + 8 delta'
  Rat ratio_event_mass_value;
  uint64_t trials = 0;
  uint64_t fallback_count = 0;
};

LossyResult lossy_achieve(const JointDist& d_xyz, const std::vector<std::vector<Rat>>& m_kernel,
                          const std::vector<std::vector<Rat>>& n_kernel,
                          const std::function<std::pair<int, int>(int, int, int)>& decode_map,
                          const std::function<Rat(int, int, int, int)>& distortion, const Rat& k,
                          const Rate& r1, const Rate& r2, const Rat& delta, const Rat& delta_prime,
                          uint64_t trials, const ProtocolOptions& opt = {});

}  // namespace oneshot
