#pragma once
// Extended source for the coding construction: the task joint together with
// the integer K and the uniformizer kernels for E and F, represented by the
// integer weight tables w_m(x) = K p_{M|X=x}(m) and v_n(y) = K p_{N|Y=y}(n).

#include <vector>

#include "oneshot/dist.hpp"

namespace oneshot {

struct ExtendedSource {
  JointDist base;       // task joint over X,Y,Z,M,N (perturbed if needed)
  JointDist p_xyz;      // marginal, kept for sampling
  long K = 0;
  // weights indexed [x][m] and [y][n]; zero where the kernel vanishes
  std::vector<std::vector<long>> w;
  std::vector<std::vector<long>> v;
  std::vector<std::vector<Rat>> m_kernel;  // p_{M|X=x}
  std::vector<std::vector<Rat>> n_kernel;  // p_{N|Y=y}
  Rat perturb_tv = 0;   // exact distance to the caller's joint
  bool perturbed = false;

  int x_size() const { return base.var_size("X"); }
  int y_size() const { return base.var_size("Y"); }
  int z_size() const { return base.var_size("Z"); }
  int m_size() const { return base.var_size("M"); }
  int n_size() const { return base.var_size("N"); }
};

struct ExtendedSourceOptions {
  // K must divide into the square-partition grid; callers pass s^{c+1}.
  long pad_multiple = 1;
  // Reject instances whose minimal K exceeds this.
  long k_cap = 1L << 40;
};

// Thrown when the minimal feasible K exceeds the cap; carries that K.
struct KCapExceeded : BudgetError {
  std::string minimal_k;
  explicit KCapExceeded(const std::string& k)
      : BudgetError("minimal feasible K " + k + " exceeds the configured cap"), minimal_k(k) {}
};

// Builds the extended source from a task joint (Markov conditions checked).
// When the positive kernel weights are not pairwise distinct (per side), the
// kernels are perturbed by mixing rows with the uniform row using distinct
// dyadic weights, keeping tv_half(original, perturbed) <= perturb_tolerance.
ExtendedSource build_extended_source(const JointDist& d, const Rat& perturb_tolerance,
                                     const ExtendedSourceOptions& opt = {});

// Normalized convex-split index weights for one party: given the observed x
// and the shared copies (m_i, e_i), weight(i) is proportional to
// p_{ME|X=x}(m_i,e_i) / p_S(m_i,e_i). If every weight vanishes the uniform
// vector is returned and *fallback is set (this signals a bug upstream).
std::vector<Rat> convex_split_index_weights(int x, const std::vector<std::pair<int, long>>& copies,
                                            const ExtendedSource& src, bool* fallback = nullptr);

}  // namespace oneshot
