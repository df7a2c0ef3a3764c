#pragma once
// Randomized exact-property batteries behind the `lemmas` subcommand, plus
// the shared random-instance generators used by tests.

#include <string>
#include <vector>

#include "oneshot/dist.hpp"
#include "oneshot/rng.hpp"

namespace oneshot {

// Random distribution with integer weights <= max_weight (exact rationals).
JointDist random_dist(RngStream& rng, std::vector<Var> vars, long max_weight = 32);

// Random kernel rows (each summing to 1) with denominator K; when
// `distinct` is set the positive numerators are distinct across the table.
std::vector<std::vector<Rat>> random_kernel(RngStream& rng, int rows, int cols, long K,
                                            bool distinct);

// Random task joint over X,Y,Z,M,N built as p_XYZ x p_{M|X} x p_{N|Y}.
JointDist random_task_joint(RngStream& rng, int nx, int ny, int nz, int nm, int nn,
                            long kernel_den = 16, bool distinct_weights = false);

struct SuiteReport {
  std::string suite;
  int count = 0;
  int failures = 0;
  std::vector<std::string> failure_dumps;  // JSON instances for replay
  bool ok() const { return failures == 0; }
};

const std::vector<std::string>& lemma_suite_names();
SuiteReport run_lemma_suite(const std::string& name, uint64_t seed, int count);

}  // namespace oneshot
