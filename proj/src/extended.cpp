#include "oneshot/extended.hpp"

#include <algorithm>
#include <map>

#include "oneshot/info.hpp"

namespace oneshot {

namespace {

// True when every positive entry across the active rows is distinct.
bool weights_distinct(const std::vector<std::vector<Rat>>& kernel, const std::vector<bool>& active) {
  std::vector<Rat> pos;
  for (size_t r = 0; r < kernel.size(); ++r) {
    if (!active[r]) continue;
    for (const auto& p : kernel[r])
      if (sgn(p) > 0) pos.push_back(p);
  }
  std::sort(pos.begin(), pos.end());
  return std::adjacent_find(pos.begin(), pos.end()) == pos.end();
}

// Mixes active row r with the uniform row at weight eta_r = (r+1) * eta.
std::vector<std::vector<Rat>> mix_rows(const std::vector<std::vector<Rat>>& kernel,
                                       const std::vector<bool>& active, const Rat& eta) {
  std::vector<std::vector<Rat>> out = kernel;
  for (size_t r = 0; r < out.size(); ++r) {
    if (!active[r] || out[r].empty()) continue;
    Rat er = eta * Rat(long(r) + 1);
    Rat u(1, static_cast<unsigned long>(out[r].size()));
    for (auto& p : out[r]) p = (1 - er) * p + er * u;
  }
  return out;
}

Rat kernel_tv(const std::vector<std::vector<Rat>>& a, const std::vector<std::vector<Rat>>& b,
              const JointDist& row_marginal) {
  Rat tv = 0;
  for (size_t r = 0; r < a.size(); ++r) {
    if (a[r].empty()) continue;
    Rat row = 0;
    for (size_t j = 0; j < a[r].size(); ++j) row += abs(a[r][j] - b[r][j]);
    tv += row_marginal.probs()[r] * row;
  }
  return tv / 2;
}

// Perturbs for distinctness with exact tie detection, halving eta on retry.
std::vector<std::vector<Rat>> make_distinct(const std::vector<std::vector<Rat>>& kernel,
                                            const std::vector<bool>& active, const Rat& budget) {
  // a single-symbol message carries nothing; its weights are vacuously tied
  if (!kernel.empty() && kernel[0].size() <= 1) return kernel;
  if (weights_distinct(kernel, active)) return kernel;
  if (sgn(budget) <= 0)
    throw PreconditionError("tied kernel weights but zero perturbation tolerance");
  size_t rows = kernel.size();
  // eta * (rows+1) bounds the per-row mixing weight; start well under budget.
  Rat eta = budget / Rat(long(rows) + 1) / 2;
  // snap to a dyadic value to keep denominators (and K) small
  long e = std::max<long>(1, long(std::ceil(-rat_log2(eta))));
  eta = rat_pow2(-e);
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto cand = mix_rows(kernel, active, eta);
    if (weights_distinct(cand, active)) return cand;
    eta /= 2;
  }
  throw PreconditionError("distinctness perturbation failed to converge");
}

}  // namespace

ExtendedSource build_extended_source(const JointDist& d, const Rat& perturb_tolerance,
                                     const ExtendedSourceOptions& opt) {
  require_task_markov(d);
  ExtendedSource src;
  JointDist canon = d.marginal({"X", "Y", "Z", "M", "N"});
  src.p_xyz = canon.marginal({"X", "Y", "Z"});
  auto mk = conditional_kernel(canon, {"M"}, {"X"});
  auto nk = conditional_kernel(canon, {"N"}, {"Y"});
  // zero-mass rows keep a uniform placeholder so weights stay defined
  JointDist px = canon.marginal({"X"});
  JointDist py = canon.marginal({"Y"});
  for (size_t x = 0; x < mk.size(); ++x)
    if (sgn(px.probs()[x]) == 0)
      for (auto& p : mk[x]) p = Rat(1, static_cast<unsigned long>(mk[x].size()));
  for (size_t y = 0; y < nk.size(); ++y)
    if (sgn(py.probs()[y]) == 0)
      for (auto& p : nk[y]) p = Rat(1, static_cast<unsigned long>(nk[y].size()));

  std::vector<bool> x_active(mk.size()), y_active(nk.size());
  for (size_t x = 0; x < mk.size(); ++x) x_active[x] = sgn(px.probs()[x]) > 0;
  for (size_t y = 0; y < nk.size(); ++y) y_active[y] = sgn(py.probs()[y]) > 0;

  Rat half_tol = perturb_tolerance / 2;
  auto mk2 = make_distinct(mk, x_active, half_tol);
  auto nk2 = make_distinct(nk, y_active, half_tol);
  Rat tv_m = kernel_tv(mk, mk2, px);
  Rat tv_n = kernel_tv(nk, nk2, py);
  if (tv_m + tv_n > perturb_tolerance)
    throw PreconditionError("perturbation exceeded tolerance");  // unreachable by construction
  src.perturbed = (tv_m + tv_n) > 0;
  src.perturb_tv = tv_m + tv_n;
  src.m_kernel = mk2;
  src.n_kernel = nk2;

  // K = lcm of all positive kernel denominators, padded to the grid multiple.
  Int k = opt.pad_multiple;
  auto fold = [&k](const std::vector<std::vector<Rat>>& kernel) {
    for (const auto& row : kernel)
      for (const auto& p : row)
        if (sgn(p) > 0) {
          Int den = p.get_den();
          mpz_lcm(k.get_mpz_t(), k.get_mpz_t(), den.get_mpz_t());
        }
  };
  fold(mk2);
  fold(nk2);
  if (k > Int(opt.k_cap)) throw KCapExceeded(k.get_str());
  src.K = int_to_long(k, "K");

  auto weigh = [&](const std::vector<std::vector<Rat>>& kernel) {
    std::vector<std::vector<long>> w(kernel.size());
    for (size_t r = 0; r < kernel.size(); ++r) {
      w[r].resize(kernel[r].size(), 0);
      for (size_t j = 0; j < kernel[r].size(); ++j) {
        Rat scaled = kernel[r][j] * Rat(src.K);
        if (scaled.get_den() != 1)
          throw PreconditionError("K * p is not integral");  // unreachable by construction
        w[r][j] = int_to_long(Int(scaled.get_num()), "weight");
      }
    }
    return w;
  };
  src.w = weigh(mk2);
  src.v = weigh(nk2);

  // Rebuild the joint from the perturbed kernels over the same p_XYZ.
  JointDist with_m = extend_with_kernel(src.p_xyz, "X", "M", mk2);
  src.base = extend_with_kernel(with_m, "Y", "N", nk2);
  return src;
}

std::vector<Rat> convex_split_index_weights(int x, const std::vector<std::pair<int, long>>& copies,
                                            const ExtendedSource& src, bool* fallback) {
  if (x < 0 || x >= src.x_size()) throw PreconditionError("x out of range");
  std::vector<Rat> out(copies.size(), Rat(0));
  Rat total = 0;
  // p_{ME|X=x}(m,e) = 1[e <= w_m(x)] / K and p_S(m,e) = 1/(|M| K), so each
  // weight is |M| * indicator; the general ratio is kept for clarity.
  Rat ps = Rat(1) / (Rat(src.m_size()) * Rat(src.K));
  for (size_t i = 0; i < copies.size(); ++i) {
    auto [m, e] = copies[i];
    if (m < 0 || m >= src.m_size() || e < 1 || e > src.K)
      throw PreconditionError("copy symbol out of range");
    long wm = src.w[x][m];
    if (e <= wm && wm > 0) {
      Rat pme = Rat(1) / Rat(src.K);
      out[i] = pme / ps;
      total += out[i];
    }
  }
  if (sgn(total) == 0) {
    if (fallback) *fallback = true;
    Rat u(1, static_cast<unsigned long>(copies.size()));
    for (auto& q : out) q = u;
    return out;
  }
  if (fallback) *fallback = false;
  for (auto& q : out) q /= total;
  return out;
}

}  // namespace oneshot
