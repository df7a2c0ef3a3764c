#include "oneshot/coding.hpp"

#include <algorithm>

namespace oneshot {

namespace {

// Number of weak compositions of n into k parts, as a budget estimate.
Int composition_count(int n, int k) {
  Int c;
  mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n + k - 1),
               static_cast<unsigned long>(k - 1));
  return c;
}

// DFS over weak compositions of `n` across `k` symbols, carrying the
// multinomial weight prod C(remaining, c_i) q_i^{c_i} and the partial sum
// sum c_i rho_i. Calls leaf(weight, rho_sum).
template <typename Leaf>
void for_each_type(int n, const std::vector<Rat>& q, const std::vector<Rat>& rho, Leaf&& leaf) {
  const int k = int(q.size());
  std::vector<Rat> pow_cache;
  std::function<void(int, int, Rat, Rat)> rec = [&](int i, int rem, Rat weight, Rat rsum) {
    if (i == k - 1) {
      // last symbol absorbs the remainder; C(rem, rem) = 1
      Rat w = weight;
      for (int t = 0; t < rem; ++t) w *= q[i];
      leaf(w, Rat(rsum + Rat(rem) * rho[i]));
      return;
    }
    Rat w = weight;
    for (int c = 0; c <= rem; ++c) {
      if (c > 0) {
        // update binomial C(rem, c) incrementally: *(rem-c+1)/c, times q_i
        w = w * Rat(rem - c + 1) / Rat(c) * q[i];
      }
      rec(i + 1, rem - c, w, Rat(rsum + Rat(c) * rho[i]));
    }
  };
  rec(0, n, Rat(1), Rat(0));
}

}  // namespace

Rat convex_split_tv_exact(const JointDist& dist_xm, const JointDist& w, int R, long budget) {
  if (dist_xm.arity() != 2) throw PreconditionError("convex split needs a two-variable joint");
  if (w.arity() != 1 || w.vars()[0].size != dist_xm.vars()[1].size)
    throw PreconditionError("W alphabet mismatch");
  if (R < 0) throw PreconditionError("negative R");
  const int nx = dist_xm.vars()[0].size;
  const int nm = dist_xm.vars()[1].size;
  const long copies = 1L << R;

  JointDist px = dist_xm.marginal({dist_xm.vars()[0].name});
  JointDist pm = dist_xm.marginal({dist_xm.vars()[1].name});

  // Mass the mixture puts outside supp(W)^copies; the product has none there.
  Rat escaped = 0;
  std::vector<int> supp;
  for (int m = 0; m < nm; ++m) {
    if (sgn(w.probs()[m]) > 0)
      supp.push_back(m);
    else
      escaped += pm.probs()[m];
  }
  if (supp.empty()) throw PreconditionError("W has empty support");

  const int k = int(supp.size());
  Int types = composition_count(int(copies), k);
  if (types * nx > budget)
    throw BudgetError("convex-split enumeration needs " + Int(types * nx).get_str() +
                      " states, budget " + std::to_string(budget));

  std::vector<Rat> q(k);
  for (int i = 0; i < k; ++i) q[i] = w.probs()[supp[i]];

  Rat acc = 0;
  std::vector<Rat> rho(k);
  for (int x = 0; x < nx; ++x) {
    const Rat& pxv = px.probs()[x];
    if (sgn(pxv) == 0) continue;
    for (int i = 0; i < k; ++i)
      rho[i] = dist_xm.probs()[size_t(x) * nm + supp[i]] / (pxv * q[i]);
    Rat inner = 0;
    for_each_type(int(copies), q, rho, [&](const Rat& weight, const Rat& rsum) {
      inner += weight * abs(rsum / Rat(copies) - 1);
    });
    acc += pxv * inner;
  }
  return (escaped + acc) / 2;
}

Rat bipartite_convex_split_tv_exact(const JointDist& dist_xmn, const JointDist& u,
                                    const JointDist& v, int R1, int R2, long budget) {
  if (dist_xmn.arity() != 3) throw PreconditionError("bipartite convex split needs three variables");
  const int nx = dist_xmn.vars()[0].size;
  const int nm = dist_xmn.vars()[1].size;
  const int nn = dist_xmn.vars()[2].size;
  if (u.arity() != 1 || u.vars()[0].size != nm) throw PreconditionError("U alphabet mismatch");
  if (v.arity() != 1 || v.vars()[0].size != nn) throw PreconditionError("V alphabet mismatch");
  if (R1 < 0 || R2 < 0) throw PreconditionError("negative rate");
  const long c1 = 1L << R1, c2 = 1L << R2;

  JointDist px = dist_xmn.marginal({dist_xmn.vars()[0].name});
  JointDist pmn = dist_xmn.marginal({dist_xmn.vars()[1].name, dist_xmn.vars()[2].name});

  std::vector<int> supp_m, supp_n;
  for (int m = 0; m < nm; ++m)
    if (sgn(u.probs()[m]) > 0) supp_m.push_back(m);
  for (int n = 0; n < nn; ++n)
    if (sgn(v.probs()[n]) > 0) supp_n.push_back(n);
  if (supp_m.empty() || supp_n.empty()) throw PreconditionError("auxiliary support empty");

  // Mass escaping the product support on either side.
  Rat escaped = 0;
  for (int m = 0; m < nm; ++m)
    for (int n = 0; n < nn; ++n)
      if (sgn(u.probs()[m]) == 0 || sgn(v.probs()[n]) == 0)
        escaped += pmn.probs()[size_t(m) * nn + n];

  const int km = int(supp_m.size()), kn = int(supp_n.size());
  Int types = composition_count(int(c1), km) * composition_count(int(c2), kn);
  if (types * nx > budget)
    throw BudgetError("bipartite convex-split enumeration needs " + Int(types * nx).get_str() +
                      " states, budget " + std::to_string(budget));

  std::vector<Rat> qm(km), qn(kn);
  for (int i = 0; i < km; ++i) qm[i] = u.probs()[supp_m[i]];
  for (int j = 0; j < kn; ++j) qn[j] = v.probs()[supp_n[j]];

  Rat acc = 0;
  const Rat total_slots = Rat(c1) * Rat(c2);
  for (int x = 0; x < nx; ++x) {
    const Rat& pxv = px.probs()[x];
    if (sgn(pxv) == 0) continue;
    // rho(m,n) over the auxiliary supports
    std::vector<std::vector<Rat>> rho(km, std::vector<Rat>(kn));
    for (int i = 0; i < km; ++i)
      for (int j = 0; j < kn; ++j)
        rho[i][j] = dist_xmn.probs()[(size_t(x) * nm + supp_m[i]) * nn + supp_n[j]] /
                    (pxv * qm[i] * qn[j]);
    Rat inner = 0;
    // outer types over the M side; per leaf, g(n) = sum_i c_i rho(i,n)
    std::vector<Rat> zero_rho(km, Rat(0));
    std::function<void(int, int, Rat, std::vector<Rat>&)> rec_m = [&](int i, int rem, Rat weight,
                                                                      std::vector<Rat>& g) {
      if (i == km - 1) {
        Rat wfin = weight;
        for (int t = 0; t < rem; ++t) wfin *= qm[i];
        std::vector<Rat> gf = g;
        if (rem > 0)
          for (int j = 0; j < kn; ++j) gf[j] += Rat(rem) * rho[i][j];
        // inner types over the N side
        for_each_type(int(c2), qn, gf, [&](const Rat& wn, const Rat& total) {
          inner += wfin * wn * abs(total / total_slots - 1);
        });
        return;
      }
      Rat wcur = weight;
      for (int c = 0; c <= rem; ++c) {
        if (c > 0) {
          wcur = wcur * Rat(rem - c + 1) / Rat(c) * qm[i];
          for (int j = 0; j < kn; ++j) g[j] += rho[i][j];
        }
        rec_m(i + 1, rem - c, wcur, g);
      }
      for (int j = 0; j < kn; ++j) g[j] -= Rat(rem) * rho[i][j];
    };
    std::vector<Rat> g0(kn, Rat(0));
    rec_m(0, int(c1), Rat(1), g0);
    acc += pxv * inner;
  }
  return (escaped + acc) / 2;
}

int sequential_decode(const std::vector<int>& h, const std::vector<std::string>& h_vars,
                      const std::vector<EventSet>& tests) {
  for (size_t i = 0; i < tests.size(); ++i) {
    const EventSet& t = tests[i];
    // project h onto the test's variables
    std::vector<int> sub;
    sub.reserve(t.vars.size());
    for (const auto& name : t.vars) {
      auto it = std::find(h_vars.begin(), h_vars.end(), name);
      if (it == h_vars.end()) throw PreconditionError("test refers to unknown variable " + name);
      sub.push_back(h[size_t(it - h_vars.begin())]);
    }
    if (t.contains(sub)) return int(i) + 1;
  }
  return int(tests.size()) + 1;
}

DecodeErrorReport sequential_decode_error_exact(const JointDist& joint_ch,
                                                const std::vector<EventSet>& tests) {
  if (joint_ch.arity() < 2) throw PreconditionError("need a class variable plus H");
  const int c_plus_1 = joint_ch.vars()[0].size;
  const int c = c_plus_1 - 1;
  if (int(tests.size()) != c) throw PreconditionError("need exactly c tests");
  const std::string c_name = joint_ch.vars()[0].name;
  std::vector<std::string> h_vars;
  for (int i = 1; i < joint_ch.arity(); ++i) h_vars.push_back(joint_ch.vars()[i].name);

  JointDist pc = joint_ch.marginal({c_name});
  for (int i = 0; i < c; ++i)
    if (sgn(pc.probs()[i]) == 0) throw PreconditionError("support of C must be exactly [c]");
  if (sgn(pc.probs()[c]) != 0) throw PreconditionError("support of C must be exactly [c]");

  JointDist ph = joint_ch.marginal(h_vars);
  const size_t nh = ph.tensor_size();

  // decode table over H cells
  std::vector<int> dec(nh);
  {
    std::vector<int> h_idx;
    for (size_t r = 0; r < nh; ++r) {
      ph.unrank(r, h_idx);
      dec[r] = sequential_decode(h_idx, h_vars, tests) - 1;  // 0-based class
    }
  }

  // Pr_{H_i}[A_j] table
  std::vector<std::vector<Rat>> accept(c, std::vector<Rat>(c, Rat(0)));
  std::vector<int> idx, h_idx(h_vars.size());
  joint_ch.for_each_support([&](const std::vector<int>& full, const Rat& p) {
    int i = full[0];
    for (size_t k = 0; k < h_vars.size(); ++k) h_idx[k] = full[k + 1];
    for (int j = 0; j < c; ++j) {
      // membership of h in tests[j]
      const EventSet& t = tests[j];
      std::vector<int> sub;
      sub.reserve(t.vars.size());
      for (const auto& name : t.vars) {
        auto it = std::find(h_vars.begin(), h_vars.end(), name);
        sub.push_back(h_idx[size_t(it - h_vars.begin())]);
      }
      if (t.contains(sub)) accept[i][j] += p;
    }
  });
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) accept[i][j] /= pc.probs()[i];

  DecodeErrorReport rep;
  rep.eps = 0;
  for (int i = 0; i < c; ++i) {
    Rat miss = Rat(1) - accept[i][i];
    if (miss > rep.eps) rep.eps = miss;
  }
  rep.bound = rep.eps;
  for (int i = 0; i < c; ++i) {
    Rat cross = 0;
    for (int j = 0; j < c; ++j)
      if (j != i) cross += accept[i][j];
    rep.bound += pc.probs()[i] * cross;
  }

  // exact half-l1 between HC and HC' (C' = dec(H) deterministically)
  Rat tv = 0;
  std::vector<int> full_idx;
  // iterate over the full (C,H) grid
  for (size_t r = 0; r < joint_ch.tensor_size(); ++r) {
    joint_ch.unrank(r, full_idx);
    int i = full_idx[0];
    size_t hr = 0;
    {
      std::vector<int> h_only(full_idx.begin() + 1, full_idx.end());
      hr = ph.rank(h_only);
    }
    Rat p_hc = joint_ch.probs()[r];
    Rat p_hcp = (dec[hr] == i) ? ph.probs()[hr] : Rat(0);
    tv += abs(p_hc - p_hcp);
  }
  rep.tv = tv / 2;
  return rep;
}

bool tail_dominance_check(const JointDist& eg) {
  if (eg.arity() != 2) throw PreconditionError("tail_dominance_check needs exactly (E,G)");
  const int K = eg.vars()[0].size;
  if (eg.vars()[1].size != K) throw PreconditionError("E and G must share [K]");
  // support condition: p(e,g) = 0 when e > g (1-based values, 0-based index)
  for (int e = 0; e < K; ++e)
    for (int g = 0; g < K; ++g)
      if (e > g && sgn(eg.probs()[size_t(e) * K + g]) != 0)
        throw PreconditionError("support condition e <= g violated");

  JointDist pe = eg.marginal({eg.vars()[0].name});
  JointDist pg = eg.marginal({eg.vars()[1].name});
  // tail_g[e] = Pr[G >= e] (value e, index e); suffix sums
  std::vector<Rat> tail_g(K + 1, Rat(0));
  for (int g = K - 1; g >= 0; --g) tail_g[g] = tail_g[g + 1] + pg.probs()[g];
  std::vector<Rat> suff_e(K + 1, Rat(0));
  for (int e = K - 1; e >= 0; --e) suff_e[e] = suff_e[e + 1] + pe.probs()[e];

  // check at each achieved breakpoint t = tail_g[e*]: since tail_g is
  // nonincreasing, {e : tail_g[e] <= t} is a suffix.
  for (int estar = 0; estar < K; ++estar) {
    const Rat& t = tail_g[estar];
    int lo = estar;
    while (lo > 0 && tail_g[lo - 1] <= t) --lo;
    if (suff_e[lo] > t) return false;
  }
  return true;
}

}  // namespace oneshot
