#include "oneshot/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace oneshot {

// ---- hard source -------------------------------------------------------------

HardInstance build_hard_instance(long big_n, const Rat& eps) {
  if (eps > Rat(1, 64) || sgn(eps) <= 0)
    throw PreconditionError("eps must lie in (0, 1/64]");
  Int num = eps.get_num(), den = eps.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    throw PreconditionError("eps must be a perfect rational square");
  Int sn, sd;
  mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
  HardInstance h;
  h.big_n = big_n;
  h.eps = eps;
  h.delta = Rat(sn, sd);
  Rat dn = h.delta * Rat(big_n);
  if (dn.get_den() != 1) throw PreconditionError("delta * N must be integral");
  long delta_n = int_to_long(Int(dn.get_num()), "delta N");
  h.x_size = big_n - delta_n;

  std::vector<Var> vars = {{"X", int(h.x_size)}, {"Z", int(big_n)}};
  std::vector<Rat> probs(size_t(h.x_size) * big_n, Rat(0));
  Rat pz(1, static_cast<unsigned long>(big_n));
  Rat unif(1, static_cast<unsigned long>(h.x_size));
  for (long z = 0; z < big_n; ++z) {
    if (z < delta_n) {
      for (long x = 0; x < h.x_size; ++x) probs[size_t(x) * big_n + z] = pz * unif;
    } else {
      probs[size_t(z - delta_n) * big_n + z] = pz;
    }
  }
  h.dist = JointDist(std::move(vars), std::move(probs));
  return h;
}

double hard_instance_cond_entropy(const HardInstance& h) {
  return rat_double(h.delta) * std::log2(double(h.x_size));
}

void check_prefix_free(const OneWayProtocol& p) {
  // duplicate codewords are allowed (non-injective encoders are legal
  // protocols); only proper prefixes break expected-length accounting
  for (const auto& table : p.enc) {
    std::vector<std::string> codes(table);
    std::sort(codes.begin(), codes.end());
    for (size_t i = 0; i + 1 < codes.size(); ++i)
      if (codes[i] != codes[i + 1] && codes[i + 1].compare(0, codes[i].size(), codes[i]) == 0)
        throw PreconditionError("encoder is not prefix-free: '" + codes[i] + "' prefixes '" +
                                codes[i + 1] + "'");
  }
}

OneWayEval evaluate_oneway(const OneWayProtocol& p, const HardInstance& h) {
  check_prefix_free(p);
  JointDist px = h.dist.marginal({"X"});
  OneWayEval ev{0, 0};
  for (size_t r = 0; r < p.p_r.size(); ++r) {
    if (sgn(p.p_r[r]) == 0) continue;
    for (long x = 0; x < h.x_size; ++x)
      ev.expected_cost += px.probs()[x] * p.p_r[r] * Rat(long(p.enc[r][x].size()));
  }
  h.dist.for_each_support([&](const std::vector<int>& idx, const Rat& pm) {
    int x = idx[0], z = idx[1];
    for (size_t r = 0; r < p.p_r.size(); ++r) {
      if (sgn(p.p_r[r]) == 0) continue;
      if (p.dec(p.enc[r][x], z, int(r)) != x) ev.error += pm * p.p_r[r];
    }
  });
  return ev;
}

ReductionResult reduction_extract(const OneWayProtocol& p, const HardInstance& h) {
  OneWayEval ev = evaluate_oneway(p, h);
  if (ev.error > h.eps)
    throw PreconditionError("protocol error " + rat_str(ev.error) + " exceeds eps " +
                            rat_str(h.eps));
  JointDist px = h.dist.marginal({"X"});
  Rat dn_rat = h.delta * Rat(h.big_n);
  long delta_n = int_to_long(Int(Rat(dn_rat).get_num()), "delta N");

  ReductionResult res;
  // Markov search for r0: cost within 3C and error within 3 eps_actual.
  for (size_t r = 0; r < p.p_r.size(); ++r) {
    if (sgn(p.p_r[r]) == 0) continue;
    Rat cost_r = 0, err_r = 0;
    for (long x = 0; x < h.x_size; ++x)
      cost_r += px.probs()[x] * Rat(long(p.enc[r][x].size()));
    h.dist.for_each_support([&](const std::vector<int>& idx, const Rat& pm) {
      if (p.dec(p.enc[r][idx[0]], idx[1], int(r)) != idx[0]) err_r += pm;
    });
    if (cost_r <= 3 * ev.expected_cost && err_r <= 3 * ev.error) {
      res.r0 = int(r);
      res.cost_r0 = cost_r;
      res.err_r0 = err_r;
      break;
    }
  }
  if (res.r0 < 0) throw PreconditionError("Markov search failed to find r0");

  // mixing column with conditional error at most 3 eps / delta
  Rat col_bound = 3 * ev.error / h.delta;
  for (long z = 0; z < delta_n; ++z) {
    Rat err_z = 0;
    for (long x = 0; x < h.x_size; ++x)
      if (p.dec(p.enc[res.r0][x], int(z), res.r0) != x)
        err_z += Rat(1, static_cast<unsigned long>(h.x_size));
    if (err_z <= col_bound) {
      res.z0 = int(z);
      res.err_z0 = err_z;
      break;
    }
  }
  if (res.z0 < 0) throw PreconditionError("no mixing column meets the error bound");

  double sqrt_eps = rat_double(h.delta);
  double inner = (1 - 3 * sqrt_eps) * double(h.x_size);
  res.chain_step1 = 3 * rat_double(ev.expected_cost) >= std::log2(inner) - 1e-12;
  res.chain_step2 = std::log2(inner) >= 0.5 * std::log2(double(h.big_n)) - 1e-12;
  res.cost_bound = hard_instance_cond_entropy(h) / (6 * sqrt_eps);
  res.derived_cost_bound_holds = rat_double(ev.expected_cost) >= res.cost_bound - 1e-12;
  return res;
}

std::vector<OneWayProtocol> builtin_oneway_protocols(const HardInstance& h) {
  const long n = h.x_size;
  const int width = int(std::ceil(std::log2(double(n))));
  Rat dn_rat = h.delta * Rat(h.big_n);
  const long delta_n = int_to_long(Int(Rat(dn_rat).get_num()), "delta N");

  auto bin = [&](long x, int w) {
    std::string s(w, '0');
    for (int b = 0; b < w; ++b)
      if ((x >> (w - 1 - b)) & 1) s[b] = '1';
    return s;
  };
  auto parse = [](const std::string& s) {
    long x = 0;
    for (char c : s) x = (x << 1) | (c == '1');
    return x;
  };

  std::vector<OneWayProtocol> out;

  // 1. verbatim fixed-width send
  {
    OneWayProtocol p;
    p.p_r = {Rat(1)};
    p.enc = {std::vector<std::string>(n)};
    for (long x = 0; x < n; ++x) p.enc[0][x] = bin(x, width);
    p.dec = [parse](const std::string& msg, int, int) { return int(parse(msg)); };
    out.push_back(std::move(p));
  }
  // 2. verbatim with a bit-flipped variant chosen by shared randomness
  {
    OneWayProtocol p;
    p.p_r = {Rat(1, 2), Rat(1, 2)};
    p.enc.assign(2, std::vector<std::string>(n));
    for (long x = 0; x < n; ++x) {
      p.enc[0][x] = bin(x, width);
      std::string flipped = bin(x, width);
      for (auto& c : flipped) c = (c == '0') ? '1' : '0';
      p.enc[1][x] = flipped;
    }
    p.dec = [parse, width](const std::string& msg, int, int r) {
      long v = parse(msg);
      if (r == 1) v = (~v) & ((1L << width) - 1);
      return int(v);
    };
    out.push_back(std::move(p));
  }
  // 3. variable-length: symbol 0 gets a 1-bit code
  {
    OneWayProtocol p;
    p.p_r = {Rat(1)};
    p.enc = {std::vector<std::string>(n)};
    p.enc[0][0] = "0";
    for (long x = 1; x < n; ++x) p.enc[0][x] = "1" + bin(x, width);
    p.dec = [parse](const std::string& msg, int, int) {
      if (msg == "0") return 0;
      return int(parse(msg.substr(1)));
    };
    out.push_back(std::move(p));
  }
  // 4. side-information shortcut: deterministic columns ignore the message
  {
    OneWayProtocol p;
    p.p_r = {Rat(1)};
    p.enc = {std::vector<std::string>(n)};
    for (long x = 0; x < n; ++x) p.enc[0][x] = bin(x, width);
    p.dec = [parse, delta_n](const std::string& msg, int z, int) {
      if (z >= delta_n) return int(z - delta_n);
      return int(parse(msg));
    };
    out.push_back(std::move(p));
  }
  // 5. permuted codebook
  {
    OneWayProtocol p;
    p.p_r = {Rat(1)};
    p.enc = {std::vector<std::string>(n)};
    for (long x = 0; x < n; ++x) p.enc[0][x] = bin((x + 7) % n, width);
    p.dec = [parse, n](const std::string& msg, int, int) {
      return int((parse(msg) - 7 + n) % n);
    };
    out.push_back(std::move(p));
  }
  // 6. small controlled error: symbol 0 is misdecoded on mixing columns
  {
    OneWayProtocol p;
    p.p_r = {Rat(1)};
    p.enc = {std::vector<std::string>(n)};
    for (long x = 0; x < n; ++x) p.enc[0][x] = bin(x, width);
    p.dec = [parse, delta_n](const std::string& msg, int z, int) {
      if (z >= delta_n) return int(z - delta_n);
      long v = parse(msg);
      if (v == 0) return 1;  // deliberate mistake, mass delta / x_size
      return int(v);
    };
    out.push_back(std::move(p));
  }
  return out;
}

// ---- interactive corner scheme -------------------------------------------------

int taskb_banked_bits(const JointDist& d, const std::string& source, const std::string& msg,
                      const std::vector<std::string>& side, const Rat& delta, const Rat& eps) {
  JointDist pm = d.marginal({msg});
  int support = 0;
  for (const auto& p : pm.probs())
    if (sgn(p) > 0) ++support;
  if (support <= 1) return 0;  // constants need no message

  // spectrum of p_{msg|source} / p_{msg|side}
  std::vector<std::string> all = {source, msg};
  all.insert(all.end(), side.begin(), side.end());
  JointDist j = d.marginal(all);
  JointDist p_src = j.marginal({source});
  JointDist p_src_msg = j.marginal({source, msg});
  std::vector<std::string> side_msg(side);
  side_msg.push_back(msg);
  JointDist p_side_msg = side.empty() ? pm : j.marginal(side_msg);
  JointDist p_side = side.empty() ? JointDist() : j.marginal(side);

  const int nmsg = j.var_size(msg);
  std::vector<std::pair<Rat, Rat>> spectrum;  // (ratio, mass)
  std::vector<int> idx;
  j.for_each_support([&](const std::vector<int>& full, const Rat& p) {
    int s = full[0], m = full[1];
    Rat pmsg_src = p_src_msg.probs()[size_t(s) * nmsg + m] / p_src.probs()[s];
    Rat pmsg_side;
    if (side.empty()) {
      pmsg_side = pm.probs()[m];
    } else {
      size_t sr = 0, step = 1;
      // rank of the side tuple inside p_side / p_side_msg (side-major layout)
      std::vector<int> side_idx(full.begin() + 2, full.end());
      for (int k = int(side_idx.size()) - 1; k >= 0; --k) {
        sr += size_t(side_idx[k]) * step;
        step *= size_t(p_side.vars()[k].size);
      }
      pmsg_side = p_side_msg.probs()[sr * nmsg + m] / p_side.probs()[sr];
    }
    spectrum.emplace_back(Rat(pmsg_src / pmsg_side), p);
  });
  std::sort(spectrum.begin(), spectrum.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Rat cum = 0, target = Rat(1) - eps;
  Rat quantile = spectrum.back().first;
  for (auto& [ratio, mass] : spectrum) {
    cum += mass;
    if (cum >= target) {
      quantile = ratio;
      break;
    }
  }
  // smallest integer R with delta^4 2^R / dev >= quantile
  Rat dev = rat_from_double(rat_log2(Rat(nmsg) / delta));
  Rat need = quantile * dev / (delta * delta * delta * delta);
  long r = long(std::ceil(rat_log2(need)));
  while (rat_pow2(r) < need) ++r;
  while (r > 0 && rat_pow2(r - 1) >= need) --r;
  if (r < 0) r = 0;
  return int(std::ceil(double(r) + 2 * std::log2(3.0 / rat_double(delta))));
}

CornerSchemeResult interactive_corner_scheme(const JointDist& d, const Rat& p_mix,
                                             const Rat& delta, const Rat& eps) {
  require_task_markov(d);
  if (sgn(p_mix) < 0 || p_mix > 1) throw PreconditionError("mixing weight out of range");
  CornerSchemeResult res;
  res.cost_n_first = taskb_banked_bits(d, "Y", "N", {"Z"}, delta, eps) +
                     taskb_banked_bits(d, "X", "M", {"N", "Z"}, delta, eps);
  res.cost_m_first = taskb_banked_bits(d, "X", "M", {"Z"}, delta, eps) +
                     taskb_banked_bits(d, "Y", "N", {"M", "Z"}, delta, eps);
  res.expected_bits = rat_double(p_mix) * res.cost_n_first +
                      (1 - rat_double(p_mix)) * res.cost_m_first + res.feedback_bits;
  return res;
}

// ---- counterexample ------------------------------------------------------------

Rat alpha_from_eps(const Rat& eps) {
  double e = rat_double(eps);
  if (e <= 0 || e >= 2.0 / 27) throw PreconditionError("eps out of the solvable branch");
  double lo = std::max(1.0 / 3, 1 - 2 * std::sqrt(e));
  double hi = 1.0;
  auto g = [&](double a) { return a * (1 - a) * (1 - a) - 2 * e; };
  if (g(lo) < 0) throw PreconditionError("no root on the large-alpha branch");
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    double mid = (lo + hi) / 2;
    (g(mid) >= 0 ? lo : hi) = mid;
  }
  double a = (lo + hi) / 2;
  if (1 - a > std::sqrt(4 * e) + 1e-9)
    throw PreconditionError("root does not satisfy the branch condition");
  return rat_from_double(a);
}

CounterexampleInstance build_counterexample(const Rat& alpha, long size) {
  if (sgn(alpha) <= 0 || alpha >= 1) throw PreconditionError("alpha must lie in (0,1)");
  if (size < 4) throw PreconditionError("alphabet too small");
  CounterexampleInstance inst;
  inst.alpha = alpha;
  inst.size = size;
  const Rat a = alpha;
  const Rat u = (Rat(1) - a) / Rat(size - 1);
  const Rat q1 = Rat(size - 1), q2 = Rat(size - 2), q3 = Rat(size - 3);

  inst.p_mn[0] = a * a * a + q1 * u * u * u;                    // m = n = 1
  inst.p_mn[1] = a * a * u + a * u * u + q2 * u * u * u;        // m = 1, n != 1
  inst.p_mn[2] = inst.p_mn[1];                                  // m != 1, n = 1
  inst.p_mn[3] = inst.p_mn[1];                                  // m = n != 1
  inst.p_mn[4] = 3 * a * u * u + q3 * u * u * u;                // off-diagonal
  inst.class_counts = {Rat(1), q1, q1, q1, q1 * q2};

  auto add = [&](const Rat& km, const Rat& kn, int mn_class, const Rat& mass) {
    if (sgn(mass) == 0) return;
    inst.spectrum.push_back({Rat(km * kn / inst.p_mn[mn_class]), mass});
  };
  // x = 1
  add(a, a, 0, a * a * a);
  add(a, u, 1, a * a * u * q1);
  add(u, a, 2, a * u * a * q1);
  add(u, u, 3, a * u * u * q1);
  add(u, u, 4, a * u * u * q1 * q2);
  // x != 1 (q-1 symmetric values)
  add(a, a, 3, q1 * u * a * a);
  add(a, u, 2, q1 * u * a * u);
  add(a, u, 4, q1 * u * a * u * q2);
  add(u, a, 1, q1 * u * u * a);
  add(u, u, 0, q1 * u * u * u);
  add(u, u, 1, q1 * u * u * u * q2);
  add(u, a, 4, q1 * u * u * a * q2);
  add(u, u, 2, q1 * u * u * u * q2);
  add(u, u, 3, q1 * u * u * u * q2);
  add(u, u, 4, q1 * u * u * u * q2 * q3);

  std::sort(inst.spectrum.begin(), inst.spectrum.end(),
            [](const auto& x, const auto& y) { return x.ratio < y.ratio; });
  // merge equal ratios
  std::vector<CounterexampleInstance::ClassRow> merged;
  for (auto& row : inst.spectrum) {
    if (!merged.empty() && merged.back().ratio == row.ratio)
      merged.back().mass += row.mass;
    else
      merged.push_back(row);
  }
  inst.spectrum = std::move(merged);

  if (size <= 64) {
    std::vector<Var> vars = {{"X", int(size)}, {"M", int(size)}, {"N", int(size)}};
    std::vector<Rat> probs;
    probs.reserve(size_t(size) * size * size);
    auto px = [&](long x) { return x == 0 ? a : u; };
    auto kern = [&](long x, long t) { return t == x ? a : u; };
    for (long x = 0; x < size; ++x)
      for (long m = 0; m < size; ++m)
        for (long n = 0; n < size; ++n) probs.push_back(px(x) * kern(x, m) * kern(x, n));
    inst.dist = JointDist(std::move(vars), std::move(probs));
  }
  return inst;
}

CounterexampleReport verify_counterexample(const CounterexampleInstance& inst, const Rat& eps) {
  CounterexampleReport rep;
  rep.mass_total = 0;
  for (const auto& row : inst.spectrum) rep.mass_total += row.mass;

  rep.h_mn = 0;
  for (int c = 0; c < 5; ++c) {
    if (sgn(inst.p_mn[c]) == 0) continue;
    rep.h_mn -= rat_double(inst.class_counts[c]) * rat_double(inst.p_mn[c]) *
                rat_log2(inst.p_mn[c]);
  }
  Rat cum = 0, target = Rat(1) - eps;
  Rat quant = inst.spectrum.back().ratio;
  for (const auto& row : inst.spectrum) {
    cum += row.mass;
    if (cum >= target) {
      quant = row.ratio;
      break;
    }
  }
  rep.c_prime = rat_log2(quant);
  rep.ratio = rep.h_mn / rep.c_prime;
  double q = double(inst.size);
  double al = rat_double(inst.alpha);
  rep.ok = rep.ratio <= 7 * std::sqrt(rat_double(eps)) + 1e-12;
  rep.h_bound_ok = rep.h_mn <= (1 - al * al * al) * std::log2(q) + 3 + 1e-12;
  rep.c_bound_ok = rep.c_prime >= std::log2(q) - 3 - 1e-12;
  return rep;
}

// ---- shared-randomness reduction ------------------------------------------------

namespace {

// Candidate tuple compressed to symbol counts over (sym, val).
struct CandidateCounts {
  std::vector<long> cnt;  // [sym * K + (val-1)]
  long total = 0;
};

CandidateCounts sample_candidate(uint64_t seed, uint64_t side, uint64_t index, long copies,
                                 int alphabet, long K) {
  CandidateCounts c;
  c.cnt.assign(size_t(alphabet) * K, 0);
  c.total = copies;
  RngStream rng(seed, 0xCA4D1Du, side, index);
  for (long i = 0; i < copies; ++i) {
    long sym = long((unsigned __int128)(rng.next()) * uint64_t(alphabet) >> 64);
    long val = long((unsigned __int128)(rng.next()) * uint64_t(K) >> 64);
    c.cnt[size_t(sym) * K + val]++;
  }
  return c;
}

}  // namespace

RandReduceResult reduce_randomness(const ProtocolConfig& cfg, const Rat& delta, int search_budget,
                                   uint64_t seed) {
  if (cfg.block_exp1 != 0 || cfg.block_exp2 != 0)
    throw PreconditionError("randomness reduction needs unit scan blocks (tiny instance)");
  const ExtendedSource& src = cfg.src;
  const long K = src.K;
  const int nm = src.m_size(), nn = src.n_size(), nz = src.z_size();
  const int ny = src.y_size();
  const JointDist& base = src.base;

  RandReduceResult res;
  res.seed = seed;
  res.threshold = cfg.eps_design + 2 * delta;
  double cap_d = 24.0 * nm * nn / std::pow(rat_double(delta), 3);
  int per_side_bits = int(std::ceil(std::log2(cap_d)));
  res.bits_cap = 2 * per_side_bits;
  const long l_max = 1L << per_side_bits;

  JointDist p_xyz = src.p_xyz;  // canonical X,Y,Z
  Rat best_tv = 2;
  long best_l = 0;

  int drawn = 0;
  for (long L = 1; L <= l_max; L *= 2) {
    if (drawn + 2 * L > search_budget && L > 1) break;
    std::vector<CandidateCounts> ca, cb;
    for (long i = 0; i < L; ++i) {
      ca.push_back(sample_candidate(seed, 1, uint64_t(L * 131 + i), cfg.copies1, nm, K));
      cb.push_back(sample_candidate(seed, 2, uint64_t(L * 131 + i), cfg.copies2, nn, K));
      drawn += 2;
    }
    // exact mixture output joint
    std::vector<Rat> mix(base.tensor_size(), Rat(0));
    const Rat inv_pairs(1, static_cast<unsigned long>(L * L));
    std::vector<int> xyz_idx;
    for (size_t rxyz = 0; rxyz < p_xyz.tensor_size(); ++rxyz) {
      if (sgn(p_xyz.probs()[rxyz]) == 0) continue;
      p_xyz.unrank(rxyz, xyz_idx);
      const int x = xyz_idx[0], y = xyz_idx[1], z = xyz_idx[2];
      for (long i = 0; i < L; ++i) {
        // Alice's qualifying counts for this x
        std::vector<long> qa(size_t(nm) * K);
        long qa_tot = 0;
        for (int m = 0; m < nm; ++m) {
          long w = src.w[x][m];
          for (long e = 1; e <= w; ++e) {
            qa[size_t(m) * K + e - 1] = ca[i].cnt[size_t(m) * K + e - 1];
            qa_tot += qa[size_t(m) * K + e - 1];
          }
        }
        const std::vector<long>& sa = qa_tot ? qa : ca[i].cnt;
        const long sa_tot = qa_tot ? qa_tot : ca[i].total;
        for (long jj = 0; jj < L; ++jj) {
          std::vector<long> qb(size_t(nn) * K);
          long qb_tot = 0;
          for (int n = 0; n < nn; ++n) {
            long v = src.v[y][n];
            for (long f = 1; f <= v; ++f) {
              qb[size_t(n) * K + f - 1] = cb[jj].cnt[size_t(n) * K + f - 1];
              qb_tot += qb[size_t(n) * K + f - 1];
            }
          }
          const std::vector<long>& sb = qb_tot ? qb : cb[jj].cnt;
          const long sb_tot = qb_tot ? qb_tot : cb[jj].total;
          const Rat scale = p_xyz.probs()[rxyz] * inv_pairs / (Rat(sa_tot) * Rat(sb_tot));
          for (int m = 0; m < nm; ++m)
            for (long e = 1; e <= K; ++e) {
              long cae = sa[size_t(m) * K + e - 1];
              if (!cae) continue;
              for (int n = 0; n < nn; ++n)
                for (long f = 1; f <= K; ++f) {
                  long cbf = sb[size_t(n) * K + f - 1];
                  if (!cbf) continue;
                  bool acc = cfg.test_set->contains(m, n, z, e, f);
                  int mo = acc ? m : cfg.fallback_m;
                  int no = acc ? n : cfg.fallback_n;
                  size_t rank =
                      (((size_t(x) * ny + y) * nz + z) * nm + mo) * nn + no;
                  mix[rank] += scale * Rat(cae) * Rat(cbf);
                }
            }
        }
      }
    }
    Rat tv = 0;
    for (size_t r = 0; r < mix.size(); ++r) tv += abs(mix[r] - base.probs()[r]);
    tv /= 2;
    if (tv < best_tv) {
      best_tv = tv;
      best_l = L;
    }
    if (tv <= res.threshold) break;
    if (drawn >= search_budget) break;
  }
  res.tv = best_tv;
  res.l1 = res.l2 = best_l;
  res.shared_bits = 2 * int(std::ceil(std::log2(double(std::max<long>(1, best_l)))));
  res.ok = best_tv <= res.threshold;
  return res;
}

}  // namespace oneshot
