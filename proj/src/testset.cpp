#include "oneshot/testset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <thread>

#include "json.hpp"

namespace oneshot {

long Bitset2D::popcount() const {
  long n = 0;
  for (uint64_t w : bits_) n += __builtin_popcountll(w);
  return n;
}

SquarePartition SquarePartition::build(long K, int s, int max_mn) {
  if (s < 2) throw PreconditionError("1/sqrt(delta) must be an integer greater than 1");
  SquarePartition p;
  p.K = K;
  p.s = s;
  p.delta = Rat(1, static_cast<unsigned long>(long(s) * s));
  long pw = 1;
  int c = 0;
  while (pw < long(max_mn) * s * s) {
    pw *= s;
    ++c;
  }
  p.c = c;
  long grid = pw * s;  // s^{c+1}
  if (K % grid != 0)
    throw PreconditionError("K must be a multiple of s^{c+1} = " + std::to_string(grid) +
                            " (pad K)");
  p.inner_side = K / pw;
  for (int i = 0; i < c; ++i) {
    long hi_bound = p.level_bound(i);
    long lo_bound = p.level_bound(i + 1);
    long g = p.cell_width(i);
    for (long lo = lo_bound + 1; lo <= hi_bound; lo += g)
      p.axis.push_back({i, lo, lo + g - 1});
  }
  return p;
}

long SquarePartition::level_bound(int i) const {
  long b = K;
  for (int t = 0; t < i; ++t) b /= s;
  return b;
}

long SquarePartition::cell_width(int i) const { return level_bound(i + 2); }

int SquarePartition::axis_cell_of(long t) const {
  if (t <= inner_side || t > K) return -1;
  int level = 0;
  while (t <= level_bound(level + 1)) ++level;
  long lo_bound = level_bound(level + 1);
  long g = cell_width(level);
  long j = (t - lo_bound - 1) / g;  // 0-based within level
  long base = 0;
  for (int i = 0; i < level; ++i)
    base += (level_bound(i) - level_bound(i + 1)) / cell_width(i);
  return int(base + j);
}

namespace {

struct SliceInputs {
  const ExtendedSource& src;
  const SquarePartition& part;
  Rat delta;
  Rat t1_scale, t2_scale, t3_scale;  // delta 2^{R1}, delta 2^{R2}, delta^G 2^{R1+R2}/dev
  Rat good2_m, good2_n;              // delta/|M|, delta/|N|
  const JointDist& joint;            // canonical X,Y,Z,M,N
  const JointDist& p_mnz;
  const JointDist& p_nz;
  const JointDist& p_mz;
  const JointDist& p_z;
};

void build_slice(const SliceInputs& in, int m, int n, int z, Bitset2D& bits, SliceDiag& diag,
                 std::vector<char>& good_grid) {
  const auto& src = in.src;
  const long K = src.K;
  const int nx = src.x_size(), ny = src.y_size();
  const int nm = src.m_size(), nn = src.n_size(), nz = src.z_size();
  bits = Bitset2D(K, K);
  good_grid.assign(size_t(nx) * ny, 0);
  diag = SliceDiag{};
  diag.pmnz = in.p_mnz.probs()[(size_t(m) * nn + n) * nz + z];
  if (sgn(diag.pmnz) == 0) return;
  diag.pmn_given_z = diag.pmnz / in.p_z.probs()[z];

  Rat pm_nz = diag.pmnz / in.p_nz.probs()[size_t(n) * nz + z];
  Rat pn_mz = diag.pmnz / in.p_mz.probs()[size_t(m) * nz + z];
  Rat t1 = in.t1_scale * pm_nz;
  Rat t2 = in.t2_scale * pn_mz;
  Rat t3 = in.t3_scale * diag.pmn_given_z;

  // Good indicators and the restricted (W,V) pushforward.
  std::map<std::pair<long, long>, Rat> support;  // (w,v) -> conditional mass numerator
  Rat good1 = 0, good = 0;
  for (int x = 0; x < nx; ++x) {
    const Rat& km = src.m_kernel[x][m];
    for (int y = 0; y < ny; ++y) {
      const Rat& kn = src.n_kernel[y][n];
      bool g1 = km <= t1 && kn <= t2 && km * kn <= t3;
      bool g2 = km > in.good2_m && kn > in.good2_n;
      if (g1 && g2) good_grid[size_t(x) * ny + y] = 1;
      const Rat& pfull = in.joint.probs()[(((size_t(x) * ny + y) * nz + z) * nm + m) * nn + n];
      if (sgn(pfull) == 0) continue;
      Rat cond = pfull / diag.pmnz;  // p_{XY|MNZ=mnz}
      if (g1) good1 += cond;
      if (g1 && g2) {
        good += cond;
        support[{src.w[x][m], src.v[y][n]}] += cond;
      }
    }
  }
  diag.good1_mass = good1;
  diag.good_mass = good;
  if (sgn(good) == 0) return;  // empty slice, no division by zero

  // group restricted support by rectangle
  std::map<std::pair<int, int>, std::vector<std::pair<std::pair<long, long>, Rat>>> rects;
  for (auto& [wv, mass] : support) {
    Rat q = mass / good;
    int ax = in.part.axis_cell_of(wv.first);
    int bx = in.part.axis_cell_of(wv.second);
    if (ax < 0 || bx < 0)
      throw PreconditionError("restricted support touches the inner region");  // unreachable
    rects[{ax, bx}].push_back({wv, q});
  }

  for (auto& [key, pts] : rects) {
    const AxisCell& ca = in.part.axis[key.first];
    const AxisCell& cb = in.part.axis[key.second];
    RectDiag rd;
    rd.ax = key.first;
    rd.bx = key.second;
    rd.pr_rect = 0;
    for (auto& [wv, q] : pts) rd.pr_rect += q;

    const long a0 = ca.lo, a1 = ca.hi, b0 = cb.lo, b1 = cb.hi;
    const long ga = a1 - a0 + 1, gb = b1 - b0 + 1;
    // suffix grids over the rect: tail mass and point mass sum(pw/(w v))
    std::vector<std::vector<Rat>> S1(ga + 1, std::vector<Rat>(gb + 1, Rat(0)));
    std::vector<std::vector<Rat>> S2(ga + 1, std::vector<Rat>(gb + 1, Rat(0)));
    for (auto& [wv, q] : pts) {
      Rat cond = q / rd.pr_rect;
      S1[wv.first - a0][wv.second - b0] += cond;
      S2[wv.first - a0][wv.second - b0] += cond / (Rat(wv.first) * Rat(wv.second));
    }
    for (long i = ga - 1; i >= 0; --i)
      for (long j = gb - 1; j >= 0; --j) {
        S1[i][j] += S1[i + 1][j] + S1[i][j + 1] - S1[i + 1][j + 1];
        S2[i][j] += S2[i + 1][j] + S2[i][j + 1] - S2[i + 1][j + 1];
      }

    // region-1 mass: the rect's own (e,f) cells under E'F'
    rd.region1_mass = 0;
    for (long i = 0; i < ga; ++i)
      for (long j = 0; j < gb; ++j) rd.region1_mass += S2[i][j];

    // Bad mass: cells outside the rect whose tail is <= delta. Cells with
    // e < a0 and f < b0 have tail 1 and never qualify.
    rd.bad_mass = 0;
    for (long j = 0; j < gb; ++j)
      if (S1[0][j] <= in.delta && sgn(S1[0][j]) > 0) rd.bad_mass += Rat(a0 - 1) * S2[0][j];
    for (long i = 0; i < ga; ++i)
      if (S1[i][0] <= in.delta && sgn(S1[i][0]) > 0) rd.bad_mass += Rat(b0 - 1) * S2[i][0];

    // A_rect = { (e,f) <= (a1,b1), outside the rect, tail > delta }
    long card = 0;
    // zone with e < a0 and f < b0: tail is 1, all bits join
    for (long e = 1; e < a0; ++e)
      for (long f = 1; f < b0; ++f) {
        if (!bits.test(e - 1, f - 1)) ++card;
        bits.set(e - 1, f - 1);
      }
    for (long j = 0; j < gb; ++j) {
      if (S1[0][j] > in.delta)
        for (long e = 1; e < a0; ++e) {
          if (!bits.test(e - 1, b0 + j - 1)) ++card;
          bits.set(e - 1, b0 + j - 1);
        }
    }
    for (long i = 0; i < ga; ++i) {
      if (S1[i][0] > in.delta)
        for (long f = 1; f < b0; ++f) {
          if (!bits.test(a0 + i - 1, f - 1)) ++card;
          bits.set(a0 + i - 1, f - 1);
        }
    }
    rd.a_card = card;
    diag.rects.push_back(std::move(rd));
  }
  diag.a1_card = bits.popcount();

  // Intersect with the two rectangle constraints.
  Rat e_thresh = in.t1_scale * pm_nz * Rat(K);
  Rat f_thresh = in.t2_scale * pn_mz * Rat(K);
  long e_max = std::min<long>(K, int_to_long(rat_floor(e_thresh), "A2 cap"));
  long f_max = std::min<long>(K, int_to_long(rat_floor(f_thresh), "A3 cap"));
  if (e_max < 0) e_max = 0;
  if (f_max < 0) f_max = 0;
  for (long e = 1; e <= K; ++e)
    for (long f = 1; f <= K; ++f)
      if ((e > e_max || f > f_max) && bits.test(e - 1, f - 1)) bits.clear(e - 1, f - 1);
}

}  // namespace

TestSetA build_test_set(const ExtendedSource& src, const Rate& r1, const Rate& r2,
                        const Rat& delta, const TestSetOptions& opt) {
  // delta = 1/s^2 with integer s > 1
  Rat inv = Rat(1) / delta;
  if (inv.get_den() != 1) throw PreconditionError("1/delta must be an integer square");
  Int inv_z = inv.get_num();
  Int s_z;
  if (!mpz_perfect_square_p(inv_z.get_mpz_t()))
    throw PreconditionError("1/sqrt(delta) must be an integer");
  mpz_sqrt(s_z.get_mpz_t(), inv_z.get_mpz_t());
  int s = int(int_to_long(s_z, "s"));
  if (s < 2) throw PreconditionError("1/sqrt(delta) must exceed 1");

  TestSetA a;
  a.K = src.K;
  a.delta = delta;
  a.r1 = r1;
  a.r2 = r2;
  a.m_size = src.m_size();
  a.n_size = src.n_size();
  a.z_size = src.z_size();
  a.opt = opt;
  a.dev = dev_term(a.m_size, a.n_size, delta);
  a.part = SquarePartition::build(src.K, s, std::max(a.m_size, a.n_size));

  Int states = Int(a.m_size) * a.n_size * a.z_size * src.K * src.K;
  if (states > Int(opt.budget))
    throw BudgetError("test-set enumeration needs " + states.get_str() + " states, budget " +
                      std::to_string(opt.budget));

  JointDist joint = src.base.marginal({"X", "Y", "Z", "M", "N"});
  JointDist p_mnz = joint.marginal({"M", "N", "Z"});
  JointDist p_nz = joint.marginal({"N", "Z"});
  JointDist p_mz = joint.marginal({"M", "Z"});
  JointDist p_z = joint.marginal({"Z"});

  Rat t3_scale = r1.pow2 * r2.pow2 / a.dev;
  for (int t = 0; t < opt.good1_delta_exponent; ++t) t3_scale *= delta;
  SliceInputs in{src,
                 a.part,
                 delta,
                 Rat(delta * r1.pow2),
                 Rat(delta * r2.pow2),
                 t3_scale,
                 Rat(delta / a.m_size),
                 Rat(delta / a.n_size),
                 joint,
                 p_mnz,
                 p_nz,
                 p_mz,
                 p_z};

  const size_t n_slices = size_t(a.m_size) * a.n_size * a.z_size;
  a.slices.resize(n_slices);
  a.diag.resize(n_slices);
  a.good.resize(n_slices);

  auto work = [&](size_t lo, size_t hi) {
    for (size_t si = lo; si < hi; ++si) {
      int z = int(si % a.z_size);
      int n = int((si / a.z_size) % a.n_size);
      int m = int(si / (size_t(a.z_size) * a.n_size));
      build_slice(in, m, n, z, a.slices[si], a.diag[si], a.good[si]);
    }
  };
  int threads = std::max(1, opt.threads);
  if (threads == 1 || n_slices < 2) {
    work(0, n_slices);
  } else {
    std::vector<std::thread> pool;
    size_t chunk = (n_slices + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      size_t lo = size_t(t) * chunk, hi = std::min(n_slices, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return a;
}

TestSetReport verify_test_set(const TestSetA& a, const ExtendedSource& src) {
  if (a.diag.empty()) throw PreconditionError("verification needs build diagnostics");
  const long K = a.K;
  const int nx = src.x_size(), ny = src.y_size();
  const int nm = a.m_size, nn = a.n_size, nz = a.z_size;

  JointDist joint = src.base.marginal({"X", "Y", "Z", "M", "N"});
  JointDist p_z = joint.marginal({"Z"});
  JointDist p_xmz = joint.marginal({"X", "M", "Z"});
  JointDist p_ynz = joint.marginal({"Y", "N", "Z"});

  TestSetReport rep;
  rep.eps_used = 1;
  Rat good1_total = 0, good_total = 0;
  for (size_t si = 0; si < a.diag.size(); ++si) {
    good1_total += a.diag[si].pmnz * a.diag[si].good1_mass;
    good_total += a.diag[si].pmnz * a.diag[si].good_mass;
  }
  rep.eps_used = Rat(1) - good1_total;
  rep.claim_good_mass = good_total;

  rep.true_mass = 0;
  rep.cross_me_t = 0;
  rep.cross_s_nf = 0;
  rep.product_mass = 0;
  rep.max_region1_mass = 0;
  rep.max_bad_mass = 0;
  rep.a1_card_ok = true;
  Rat d4_rate = a.delta * a.r1.pow2 * a.r2.pow2 * Rat(K) * Rat(K);

  std::vector<long> prefix;  // (K+1) x (K+1) counts, per slice
  for (int m = 0; m < nm; ++m)
    for (int n = 0; n < nn; ++n)
      for (int z = 0; z < nz; ++z) {
        const size_t si = a.slice_index(m, n, z);
        const Bitset2D& bits = a.slices[si];
        prefix.assign(size_t(K + 1) * (K + 1), 0);
        for (long e = 1; e <= K; ++e)
          for (long f = 1; f <= K; ++f)
            prefix[size_t(e) * (K + 1) + f] = prefix[size_t(e - 1) * (K + 1) + f] +
                                              prefix[size_t(e) * (K + 1) + f - 1] -
                                              prefix[size_t(e - 1) * (K + 1) + f - 1] +
                                              (bits.test(e - 1, f - 1) ? 1 : 0);
        auto count_box = [&](long e, long f) { return prefix[size_t(e) * (K + 1) + f]; };

        // true mass: E,F generated from the unrestricted joint
        for (int x = 0; x < nx; ++x) {
          long w = src.w[x][m];
          if (w == 0) continue;
          for (int y = 0; y < ny; ++y) {
            long v = src.v[y][n];
            if (v == 0) continue;
            const Rat& pfull =
                joint.probs()[(((size_t(x) * ny + y) * nz + z) * nm + m) * nn + n];
            if (sgn(pfull) == 0) continue;
            rep.true_mass += pfull * Rat(count_box(w, v)) / (Rat(w) * Rat(v));
          }
        }
        // cross terms
        for (int x = 0; x < nx; ++x) {
          long w = src.w[x][m];
          if (w == 0) continue;
          const Rat& pxmz = p_xmz.probs()[(size_t(x) * nm + m) * nz + z];
          if (sgn(pxmz) == 0) continue;
          rep.cross_me_t += pxmz * Rat(count_box(w, K)) / (Rat(w) * Rat(nn) * Rat(K));
        }
        for (int y = 0; y < ny; ++y) {
          long v = src.v[y][n];
          if (v == 0) continue;
          const Rat& pynz = p_ynz.probs()[(size_t(y) * nn + n) * nz + z];
          if (sgn(pynz) == 0) continue;
          rep.cross_s_nf += pynz * Rat(count_box(K, v)) / (Rat(v) * Rat(nm) * Rat(K));
        }
        rep.product_mass +=
            p_z.probs()[z] * Rat(bits.popcount()) / (Rat(K) * Rat(K) * Rat(nm) * Rat(nn));

        for (const auto& rd : a.diag[si].rects) {
          if (rd.region1_mass > rep.max_region1_mass) rep.max_region1_mass = rd.region1_mass;
          if (rd.bad_mass > rep.max_bad_mass) rep.max_bad_mass = rd.bad_mass;
        }
        if (Rat(a.diag[si].a1_card) > d4_rate * a.diag[si].pmn_given_z) rep.a1_card_ok = false;
      }

  rep.bound_true = Rat(1) - rep.eps_used - 5 * a.delta;
  rep.bound_cross_me_t = a.delta * a.r2.pow2 / nn;
  rep.bound_cross_s_nf = a.delta * a.r1.pow2 / nm;
  rep.bound_product = a.delta * a.r1.pow2 * a.r2.pow2 / (Rat(nm) * Rat(nn));
  rep.claim_good_bound = Rat(1) - rep.eps_used - 2 * a.delta;
  rep.ok = rep.true_mass >= rep.bound_true && rep.cross_me_t <= rep.bound_cross_me_t &&
           rep.cross_s_nf <= rep.bound_cross_s_nf && rep.product_mass <= rep.bound_product &&
           rep.claim_good_mass >= rep.claim_good_bound && rep.max_region1_mass <= a.delta &&
           rep.max_bad_mass <= 2 * a.delta && rep.a1_card_ok;
  return rep;
}

// ---- sidecar ---------------------------------------------------------------

static uint64_t fnv1a(const std::string& s, uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string testset_content_key(const ExtendedSource& src, const Rate& r1, const Rate& r2,
                                const Rat& delta) {
  std::string blob = std::to_string(src.K) + "|" + rat_str(r1.pow2) + "|" + rat_str(r2.pow2) +
                     "|" + rat_str(delta) + "|";
  for (const auto& p : src.base.probs()) blob += rat_str(p) + ",";
  char buf[32];
  snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)fnv1a(blob));
  return buf;
}

void save_test_set(const TestSetA& a, const std::string& path, const std::string& content_key) {
  nlohmann::json j;
  j["content_key"] = content_key;
  j["K"] = a.K;
  j["s"] = a.part.s;
  j["delta"] = rat_str(a.delta);
  j["r1_pow2"] = rat_str(a.r1.pow2);
  j["r2_pow2"] = rat_str(a.r2.pow2);
  j["m_size"] = a.m_size;
  j["n_size"] = a.n_size;
  j["z_size"] = a.z_size;
  j["good1_delta_exponent"] = a.opt.good1_delta_exponent;
  auto& sl = j["slices"] = nlohmann::json::array();
  for (const auto& b : a.slices) {
    std::string hex;
    hex.reserve(b.words().size() * 16);
    char buf[17];
    for (uint64_t w : b.words()) {
      snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)w);
      hex += buf;
    }
    sl.push_back(hex);
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << j.dump();
}

TestSetA load_test_set(const std::string& path, std::string* content_key) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  nlohmann::json j;
  in >> j;
  TestSetA a;
  a.K = j.at("K").get<long>();
  a.delta = rat_parse(j.at("delta").get<std::string>());
  a.r1 = Rate::from_pow2(rat_parse(j.at("r1_pow2").get<std::string>()));
  a.r2 = Rate::from_pow2(rat_parse(j.at("r2_pow2").get<std::string>()));
  a.m_size = j.at("m_size").get<int>();
  a.n_size = j.at("n_size").get<int>();
  a.z_size = j.at("z_size").get<int>();
  a.opt.good1_delta_exponent = j.at("good1_delta_exponent").get<int>();
  a.dev = dev_term(a.m_size, a.n_size, a.delta);
  a.part = SquarePartition::build(a.K, j.at("s").get<int>(), std::max(a.m_size, a.n_size));
  if (content_key) *content_key = j.at("content_key").get<std::string>();
  for (const auto& hex : j.at("slices")) {
    Bitset2D b(a.K, a.K);
    const std::string h = hex.get<std::string>();
    if (h.size() != b.words().size() * 16) throw ParseError("sidecar bit length mismatch");
    for (size_t i = 0; i < b.words().size(); ++i)
      b.words()[i] = strtoull(h.substr(i * 16, 16).c_str(), nullptr, 16);
    a.slices.push_back(std::move(b));
  }
  if (a.slices.size() != size_t(a.m_size) * a.n_size * a.z_size)
    throw ParseError("sidecar slice count mismatch");
  return a;
}

}  // namespace oneshot
