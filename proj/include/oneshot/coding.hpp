#pragma once
// Coding primitives: exact convex-split mixture distances (single and
// bipartite), the sequential position-based decoder with its exact error
// and bound, and the one-dimensional tail check feeding the test-set
// construction.

#include <vector>

#include "oneshot/dist.hpp"

namespace oneshot {

// Exact half-l1 between the convex-split mixture X M_1..M_{2^R} (one slot
// carrying p_{XM}, the rest iid W) and X x W^{2^R}. dist_xm must have two
// variables (conditioning first); w is a single-variable distribution over
// the second alphabet. Enumeration runs over type classes of W-tuples;
// budget caps type_count * |X|.
Rat convex_split_tv_exact(const JointDist& dist_xm, const JointDist& w, int R,
                          long budget = 10'000'000);

// Bipartite version: X M_1..M_{2^R1} N_1..N_{2^R2} with slot pair carrying
// p_{XMN}, the rest iid U and V. dist_xmn has three variables (X, M, N).
Rat bipartite_convex_split_tv_exact(const JointDist& dist_xmn, const JointDist& u,
                                    const JointDist& v, int R1, int R2,
                                    long budget = 10'000'000);

// First index i (1-based) with h in tests[i-1], else tests.size()+1.
// h is a symbol tuple over the schema the tests refer to.
int sequential_decode(const std::vector<int>& h, const std::vector<std::string>& h_vars,
                      const std::vector<EventSet>& tests);

struct DecodeErrorReport {
  Rat tv;        // exact half-l1 between HC and HC'
  Rat bound;     // sum_i p_C(i) sum_{j != i} Pr_{H_i}[A_j] + eps
  Rat eps;       // max_i Pr_{H_i}[not A_i]
};

// joint_ch: first variable is the class index C with size c+1 and support
// exactly {0..c-1}; remaining variables form H. tests has c entries.
DecodeErrorReport sequential_decode_error_exact(const JointDist& joint_ch,
                                                const std::vector<EventSet>& tests);

// Tail property behind the test-set construction: for joint EG on [K]^2
// (symbols are 1-based values, stored 0-based) with p(e > g) = 0, checks
// Pr_E[ Pr_G[g >= e] <= t ] <= t at every achieved tail breakpoint t.
// Throws PreconditionError when the support condition fails.
bool tail_dominance_check(const JointDist& eg);

}  // namespace oneshot
