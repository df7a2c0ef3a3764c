#include "oneshot/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace oneshot {

namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Base state for a (trial, party) copy stream; copies are addressed as
// counter positions so the receiver can regenerate any index in O(1).
uint64_t stream_key(uint64_t seed, uint64_t trial, uint64_t party) {
  uint64_t s = splitmix64(seed ^ 0x243f6a8885a308d3ULL);
  s = splitmix64(s ^ splitmix64(trial ^ 0x13198a2e03707344ULL));
  s = splitmix64(s ^ splitmix64(party ^ 0xa4093822299f31d0ULL));
  return s;
}

inline uint64_t word_at(uint64_t key, uint64_t pos) { return splitmix64(key + pos * kGolden); }

// Uniform over [0, n): multiply-shift on one 64-bit word (bias < n / 2^64).
inline long scaled(uint64_t u, long n) {
  return long((unsigned __int128)(u)*uint64_t(n) >> 64);
}

struct PartyDraw {
  int sym;   // m or n
  long val;  // e or f, 1-based in [K]
};

inline PartyDraw copy_sample(uint64_t key, long index, int alphabet, long K) {
  return {int(scaled(word_at(key, uint64_t(2 * index)), alphabet)),
          scaled(word_at(key, uint64_t(2 * index + 1)), K) + 1};
}

int pad_for(const Rat& delta, const JointDist& d) {
  Rat inv = Rat(1) / delta;
  if (inv.get_den() != 1 || !mpz_perfect_square_p(Int(inv.get_num()).get_mpz_t()))
    throw PreconditionError("1/sqrt(delta) must be an integer");
  Int s_z;
  mpz_sqrt(s_z.get_mpz_t(), Int(inv.get_num()).get_mpz_t());
  long s = int_to_long(s_z, "s");
  long maxmn = std::max(d.var_size("M"), d.var_size("N"));
  long pw = 1;
  while (pw < maxmn * s * s) pw *= s;
  return int(pw * s);  // s^{c+1}
}

TrialOutcome run_trial_impl(const ProtocolConfig& cfg, uint64_t trial, std::vector<long>& qual) {
  TrialOutcome out;
  out.bits_sent = cfg.bits_sent_nominal;
  const ExtendedSource& src = cfg.src;
  const long K = src.K;

  RngStream input_stream(cfg.seed, trial, 0);
  size_t xyz = cfg.xyz_sampler->sample(input_stream);
  const int ny = src.y_size(), nz = src.z_size();
  out.z = int(xyz % nz);
  out.y = int((xyz / nz) % ny);
  out.x = int(xyz / (size_t(nz) * ny));

  // Alice: uniform choice among copies whose (m,e) sample is consistent
  // with x (the exact convex-split weights are flat on that set).
  uint64_t akey = stream_key(cfg.seed, trial, 1);
  qual.clear();
  for (long i = 0; i < cfg.copies1; ++i) {
    PartyDraw d = copy_sample(akey, i, src.m_size(), K);
    if (d.val <= src.w[out.x][d.sym]) qual.push_back(i);
  }
  RngStream apick(cfg.seed, trial, 3);
  if (qual.empty()) {
    out.alice_zero_weight = true;
    out.j1 = long(apick.below(uint64_t(cfg.copies1)));
  } else {
    out.j1 = qual[apick.below(qual.size())];
  }
  out.jp1 = out.j1 >> cfg.block_exp1;

  uint64_t bkey = stream_key(cfg.seed, trial, 2);
  qual.clear();
  for (long i = 0; i < cfg.copies2; ++i) {
    PartyDraw d = copy_sample(bkey, i, src.n_size(), K);
    if (d.val <= src.v[out.y][d.sym]) qual.push_back(i);
  }
  RngStream bpick(cfg.seed, trial, 4);
  if (qual.empty()) {
    out.bob_zero_weight = true;
    out.j2 = long(bpick.below(uint64_t(cfg.copies2)));
  } else {
    out.j2 = qual[bpick.below(qual.size())];
  }
  out.jp2 = out.j2 >> cfg.block_exp2;

  // Charlie: first accepted pair of the signalled block, lexicographic.
  const TestSetA& ts = *cfg.test_set;
  const long alo = out.jp1 << cfg.block_exp1, ahi = alo + (1L << cfg.block_exp1);
  const long blo = out.jp2 << cfg.block_exp2, bhi = blo + (1L << cfg.block_exp2);
  out.fallback = true;
  out.m_out = cfg.fallback_m;
  out.n_out = cfg.fallback_n;
  for (long a = alo; a < ahi && out.fallback; ++a) {
    PartyDraw da = copy_sample(akey, a, src.m_size(), K);
    for (long b = blo; b < bhi; ++b) {
      PartyDraw db = copy_sample(bkey, b, src.n_size(), K);
      ++out.scan_len;
      if (ts.contains(da.sym, db.sym, out.z, da.val, db.val)) {
        out.m_out = da.sym;
        out.n_out = db.sym;
        out.fallback = false;
        break;
      }
    }
  }
  return out;
}

}  // namespace

ProtocolConfig make_protocol_config(const JointDist& d, const Rate& r1, const Rate& r2,
                                    const Rat& delta, const ProtocolOptions& opt) {
  ProtocolConfig cfg;
  ExtendedSourceOptions eopt;
  eopt.pad_multiple = pad_for(delta, d);
  eopt.k_cap = opt.k_cap;
  cfg.src = build_extended_source(d, opt.perturb_tolerance, eopt);
  cfg.test_set =
      std::make_shared<const TestSetA>(build_test_set(cfg.src, r1, r2, delta, opt.testset));
  cfg.xyz_sampler = std::make_shared<const DistSampler>(cfg.src.p_xyz);
  cfg.r1 = r1;
  cfg.r2 = r2;
  cfg.delta = delta;
  cfg.seed = opt.seed;

  double log3d = 2.0 * std::log2(3.0 / rat_double(delta));
  cfg.r3_bits = int(std::ceil(r1.bits + log3d));
  cfg.r4_bits = int(std::ceil(r2.bits + log3d));
  cfg.block_exp1 = std::max(0, int(std::floor(std::log2(double(cfg.src.m_size())) - r1.bits)));
  cfg.block_exp2 = std::max(0, int(std::floor(std::log2(double(cfg.src.n_size())) - r2.bits)));
  if (cfg.r3_bits + cfg.block_exp1 >= 63 || cfg.r4_bits + cfg.block_exp2 >= 63)
    throw BudgetError("copy count exponent overflows");
  cfg.copies1 = 1L << (cfg.r3_bits + cfg.block_exp1);
  cfg.copies2 = 1L << (cfg.r4_bits + cfg.block_exp2);
  if (cfg.copies1 > opt.copies_cap || cfg.copies2 > opt.copies_cap)
    throw BudgetError("copy count exceeds cap; lower the rates or raise copies_cap");
  double inv_delta = 3.0 * std::log2(1.0 / rat_double(delta));
  cfg.bits_sent_nominal = int(std::ceil(r1.bits + inv_delta) + std::ceil(r2.bits + inv_delta));
  cfg.eps_design = Rat(1) - ratio_event_mass(cfg.src.base, r1, r2, delta);
  return cfg;
}

TrialOutcome run_trial(const ProtocolConfig& cfg, uint64_t trial) {
  std::vector<long> scratch;
  return run_trial_impl(cfg, trial, scratch);
}

std::pair<int, long> shared_copy(const ProtocolConfig& cfg, uint64_t trial, int party, long index) {
  if (party != 1 && party != 2) throw PreconditionError("party must be 1 or 2");
  uint64_t key = stream_key(cfg.seed, trial, uint64_t(party));
  int alphabet = party == 1 ? cfg.src.m_size() : cfg.src.n_size();
  PartyDraw d = copy_sample(key, index, alphabet, cfg.src.K);
  return {d.sym, d.val};
}

ErrorEstimate estimate_error(const ProtocolConfig& cfg, uint64_t trials, int threads,
                             const std::function<void(const TrialOutcome&)>& transcript,
                             uint64_t transcript_cap) {
  if (trials == 0) throw PreconditionError("trials must be positive");
  const JointDist& base = cfg.src.base;
  const size_t cells = base.tensor_size();
  const int ny = cfg.src.y_size(), nz = cfg.src.z_size(), nm = cfg.src.m_size(),
            nn = cfg.src.n_size();

  ErrorEstimate est;
  est.joint.vars = base.vars();
  est.joint.counts.assign(cells, 0);
  est.joint.trials = trials;
  est.joint.seed = cfg.seed;

  threads = std::max(1, threads);
  std::vector<std::vector<uint64_t>> local(threads, std::vector<uint64_t>(cells, 0));
  std::vector<uint64_t> fallbacks(threads, 0), zeros(threads, 0), scans(threads, 0),
      mismatches(threads, 0);

  auto work = [&](int tid, uint64_t lo, uint64_t hi) {
    std::vector<long> scratch;
    for (uint64_t t = lo; t < hi; ++t) {
      TrialOutcome o = run_trial_impl(cfg, t, scratch);
      size_t r = (((size_t(o.x) * ny + o.y) * nz + o.z) * nm + o.m_out) * nn + o.n_out;
      local[tid][r]++;
      if (o.fallback) fallbacks[tid]++;
      if (o.alice_zero_weight || o.bob_zero_weight) zeros[tid]++;
      scans[tid] += uint64_t(o.scan_len);
      if (o.m_out != o.x || o.n_out != o.y) mismatches[tid]++;  // DSC view
    }
  };
  if (threads == 1) {
    work(0, 0, trials);
  } else {
    std::vector<std::thread> pool;
    uint64_t chunk = (trials + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      uint64_t lo = uint64_t(t) * chunk, hi = std::min<uint64_t>(trials, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(work, t, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  for (int t = 0; t < threads; ++t) {
    for (size_t r = 0; r < cells; ++r) est.joint.counts[r] += local[t][r];
    est.fallback_count += fallbacks[t];
    est.zero_weight_count += zeros[t];
    est.avg_scan += double(scans[t]);
    est.agreement_mismatch += double(mismatches[t]);
  }
  est.avg_scan /= double(trials);
  est.agreement_mismatch /= double(trials);

  if (transcript) {
    std::vector<long> scratch;
    for (uint64_t t = 0; t < std::min<uint64_t>(trials, transcript_cap); ++t)
      transcript(run_trial_impl(cfg, t, scratch));
  }

  // empirical TV against the (perturbed) base joint
  std::vector<double> pexact(cells);
  for (size_t r = 0; r < cells; ++r) pexact[r] = rat_double(base.probs()[r]);
  auto tv_of = [&](const std::vector<uint64_t>& cnt, uint64_t total) {
    double s = 0;
    for (size_t r = 0; r < cells; ++r) s += std::abs(double(cnt[r]) / double(total) - pexact[r]);
    return s / 2;
  };
  est.tv_estimate = tv_of(est.joint.counts, trials);

  // multinomial bootstrap over the empirical cells
  const int B = 200;
  std::vector<size_t> nz_cells;
  std::vector<uint64_t> cum;
  uint64_t acc = 0;
  for (size_t r = 0; r < cells; ++r)
    if (est.joint.counts[r]) {
      nz_cells.push_back(r);
      acc += est.joint.counts[r];
      cum.push_back(acc);
    }
  std::vector<double> boots(B);
  RngStream brng(cfg.seed, 0xb007u);
  std::vector<uint64_t> resample(cells);
  for (int b = 0; b < B; ++b) {
    std::fill(resample.begin(), resample.end(), 0);
    for (uint64_t t = 0; t < trials; ++t) {
      uint64_t u = brng.below(acc) + 1;
      size_t k = size_t(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
      resample[nz_cells[k]]++;
    }
    boots[b] = tv_of(resample, trials);
  }
  std::sort(boots.begin(), boots.end());
  est.ci_lo = boots[size_t(0.025 * B)];
  est.ci_hi = boots[std::min<size_t>(B - 1, size_t(0.975 * B))];

  double dd = rat_double(cfg.delta), ee = rat_double(cfg.eps_design);
  est.bound_8delta = ee + 8 * dd;
  est.bound_10delta = ee + 10 * dd;
  return est;
}

// ---- specializations -------------------------------------------------------

namespace {

std::vector<std::vector<Rat>> identity_kernel(int n) {
  std::vector<std::vector<Rat>> k(n, std::vector<Rat>(n, Rat(0)));
  for (int i = 0; i < n; ++i) k[i][i] = 1;
  return k;
}

}  // namespace

JointDist make_task_joint_dsc(const JointDist& d_xy) {
  if (d_xy.arity() != 2) throw PreconditionError("DSC source must have two variables");
  std::vector<Var> vars = {{"X", d_xy.vars()[0].size}, {"Y", d_xy.vars()[1].size}, {"Z", 1}};
  JointDist base(vars, d_xy.probs());  // trailing unit axis keeps the layout
  JointDist with_m = extend_with_kernel(base, "X", "M", identity_kernel(vars[0].size));
  return extend_with_kernel(with_m, "Y", "N", identity_kernel(vars[1].size));
}

JointDist make_task_joint_taskb(const JointDist& d_xmz) {
  for (const char* v : {"X", "M", "Z"}) d_xmz.var_index(v);
  if (!d_xmz.is_markov({"M"}, {"X"}, {"Z"}))
    throw PreconditionError("Task B source must satisfy M-X-Z");
  JointDist p_xz = d_xmz.marginal({"X", "Z"});
  std::vector<Var> vars = {{"X", p_xz.vars()[0].size}, {"Y", 1}, {"Z", p_xz.vars()[1].size}};
  JointDist base(vars, p_xz.probs());  // inner unit axis keeps the layout
  auto mk = conditional_kernel(d_xmz, {"M"}, {"X"});
  JointDist with_m = extend_with_kernel(base, "X", "M", mk);
  return extend_with_kernel(with_m, "Y", "N", {{Rat(1)}});
}

ProtocolConfig specialize_dsc(const JointDist& d_xy, const Rate& r1, const Rate& r2,
                              const Rat& delta, const ProtocolOptions& opt) {
  return make_protocol_config(make_task_joint_dsc(d_xy), r1, r2, delta, opt);
}

ProtocolConfig specialize_task_b(const JointDist& d_xmz, const Rate& r, const Rat& delta,
                                 const ProtocolOptions& opt) {
  Rate r2 = Rate::from_pow2(Rat(1) / delta);
  return make_protocol_config(make_task_joint_taskb(d_xmz), r, r2, delta, opt);
}

SchResult sch_equivalence_check(const JointDist& d_yxx) {
  if (d_yxx.arity() != 3) throw PreconditionError("need exactly (Y, X, X')");
  const int nx = d_yxx.vars()[1].size;
  if (d_yxx.vars()[2].size != nx) throw PreconditionError("X and X' alphabets differ");
  const int ny = d_yxx.vars()[0].size;

  SchResult res;
  res.pr_mismatch = 0;
  res.tv_to_ideal = 0;
  // p_YX(y,x) = sum_{x'} p(y,x,x')
  std::vector<Rat> pyx(size_t(ny) * nx, Rat(0));
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x)
      for (int xp = 0; xp < nx; ++xp)
        pyx[size_t(y) * nx + x] += d_yxx.probs()[(size_t(y) * nx + x) * nx + xp];
  Rat l1 = 0;
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x)
      for (int xp = 0; xp < nx; ++xp) {
        const Rat& p = d_yxx.probs()[(size_t(y) * nx + x) * nx + xp];
        Rat ideal = (x == xp) ? pyx[size_t(y) * nx + x] : Rat(0);
        l1 += abs(p - ideal);
        if (x != xp) res.pr_mismatch += p;
      }
  res.tv_to_ideal = l1 / 2;
  res.ok = res.tv_to_ideal <= 4 * res.pr_mismatch;
  return res;
}

LossyResult lossy_achieve(const JointDist& d_xyz, const std::vector<std::vector<Rat>>& m_kernel,
                          const std::vector<std::vector<Rat>>& n_kernel,
                          const std::function<std::pair<int, int>(int, int, int)>& decode_map,
                          const std::function<Rat(int, int, int, int)>& distortion, const Rat& k,
                          const Rate& r1, const Rate& r2, const Rat& delta, const Rat& delta_prime,
                          uint64_t trials, const ProtocolOptions& opt) {
  if (sgn(k) <= 0) throw PreconditionError("distortion threshold must be positive");
  for (const char* v : {"X", "Y", "Z"}) d_xyz.var_index(v);
  JointDist canon = d_xyz.marginal({"X", "Y", "Z"});
  JointDist with_m = extend_with_kernel(canon, "X", "M", m_kernel);
  JointDist joint = extend_with_kernel(with_m, "Y", "N", n_kernel);

  LossyResult res;
  res.ideal_exceed = 0;
  joint.for_each_support([&](const std::vector<int>& idx, const Rat& p) {
    auto [xh, yh] = decode_map(idx[3], idx[4], idx[2]);
    if (distortion(idx[0], idx[1], xh, yh) >= k) res.ideal_exceed += p;
  });

  res.ratio_event_mass_value = ratio_event_mass(joint, r1, r2, delta_prime);
  if (res.ratio_event_mass_value < Rat(1) - delta)
    throw PreconditionError("rates do not satisfy the three-ratio event at level delta");

  ProtocolConfig cfg = make_protocol_config(joint, r1, r2, delta_prime, opt);
  uint64_t exceed = 0;
  std::vector<long> scratch;
  for (uint64_t t = 0; t < trials; ++t) {
    TrialOutcome o = run_trial_impl(cfg, t, scratch);
    if (o.fallback) res.fallback_count++;
    auto [xh, yh] = decode_map(o.m_out, o.n_out, o.z);
    if (distortion(o.x, o.y, xh, yh) >= k) ++exceed;
  }
  res.trials = trials;
  res.protocol_exceed = double(exceed) / double(trials);
  res.bound = rat_double(res.ideal_exceed) + rat_double(delta) + 8 * rat_double(delta_prime);
  return res;
}

}  // namespace oneshot
