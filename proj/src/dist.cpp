#include "oneshot/dist.hpp"

#include <algorithm>
#include <limits>

namespace oneshot {

JointDist::JointDist(std::vector<Var> vars, std::vector<Rat> probs)
    : vars_(std::move(vars)), probs_(std::move(probs)) {
  std::set<std::string> names;
  size_t total = 1;
  for (const auto& v : vars_) {
    if (v.size <= 0) throw PreconditionError("variable " + v.name + " has non-positive size");
    if (!names.insert(v.name).second) throw PreconditionError("duplicate variable name " + v.name);
    total *= size_t(v.size);
  }
  if (probs_.size() != total)
    throw PreconditionError("tensor length " + std::to_string(probs_.size()) +
                            " != alphabet product " + std::to_string(total));
  Rat sum = 0;
  for (auto& p : probs_) {
    p.canonicalize();
    if (sgn(p) < 0) throw PreconditionError("negative probability entry");
    sum += p;
  }
  if (sum != 1) throw PreconditionError("probabilities sum to " + rat_str(sum) + ", expected 1");
  build_strides();
}

void JointDist::build_strides() {
  strides_.assign(vars_.size(), 1);
  for (int i = int(vars_.size()) - 2; i >= 0; --i)
    strides_[i] = strides_[i + 1] * size_t(vars_[i + 1].size);
}

JointDist JointDist::uniform(std::vector<Var> vars) {
  size_t total = 1;
  for (const auto& v : vars) total *= size_t(v.size);
  std::vector<Rat> probs(total, Rat(1, static_cast<unsigned long>(total)));
  return JointDist(std::move(vars), std::move(probs));
}

JointDist JointDist::point_mass(std::vector<Var> vars, const std::vector<int>& symbol) {
  size_t total = 1;
  for (const auto& v : vars) total *= size_t(v.size);
  std::vector<Rat> probs(total, Rat(0));
  JointDist d(std::move(vars), [&] {
    // need strides to rank; construct via temporary uniform then overwrite
    std::vector<Rat> p(total, Rat(1, static_cast<unsigned long>(total)));
    return p;
  }());
  size_t r = d.rank(symbol);
  for (auto& p : d.probs_) p = 0;
  d.probs_[r] = 1;
  return d;
}

JointDist JointDist::product(const JointDist& a, const JointDist& b) {
  std::vector<Var> vars = a.vars_;
  vars.insert(vars.end(), b.vars_.begin(), b.vars_.end());
  std::vector<Rat> probs;
  probs.reserve(a.probs_.size() * b.probs_.size());
  for (const auto& pa : a.probs_)
    for (const auto& pb : b.probs_) probs.push_back(pa * pb);
  return JointDist(std::move(vars), std::move(probs));
}

int JointDist::var_index(const std::string& name) const {
  for (size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return int(i);
  throw PreconditionError("unknown variable name " + name);
}

bool JointDist::same_schema(const JointDist& o) const {
  if (vars_.size() != o.vars_.size()) return false;
  for (size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name != o.vars_[i].name || vars_[i].size != o.vars_[i].size) return false;
  return true;
}

size_t JointDist::rank(const std::vector<int>& idx) const {
  if (idx.size() != vars_.size()) throw PreconditionError("index arity mismatch");
  size_t r = 0;
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= vars_[i].size)
      throw PreconditionError("symbol out of range for " + vars_[i].name);
    r += size_t(idx[i]) * strides_[i];
  }
  return r;
}

void JointDist::unrank(size_t r, std::vector<int>& idx) const {
  idx.resize(vars_.size());
  for (size_t i = 0; i < vars_.size(); ++i) {
    idx[i] = int(r / strides_[i]);
    r %= strides_[i];
  }
}

Rat JointDist::prob(const Assignment& full) const {
  std::vector<int> idx(vars_.size());
  for (size_t i = 0; i < vars_.size(); ++i) {
    if (!full.has(vars_[i].name)) throw PreconditionError("assignment misses " + vars_[i].name);
    idx[i] = full.at(vars_[i].name);
  }
  return prob(idx);
}

std::vector<int> JointDist::indices_of(const std::vector<std::string>& names) const {
  std::vector<int> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(var_index(n));
  return out;
}

Rat JointDist::mass(const EventSet& g) const {
  auto gi = indices_of(g.vars);
  Rat total = 0;
  std::vector<int> idx, sub(gi.size());
  for (size_t r = 0; r < probs_.size(); ++r) {
    if (sgn(probs_[r]) == 0) continue;
    unrank(r, idx);
    for (size_t k = 0; k < gi.size(); ++k) sub[k] = idx[gi[k]];
    if (g.contains(sub)) total += probs_[r];
  }
  return total;
}

Rat JointDist::mass(const Assignment& partial) const {
  std::vector<std::pair<int, int>> fixed;
  for (const auto& [name, val] : partial.values) {
    int vi = var_index(name);
    if (val < 0 || val >= vars_[vi].size) throw PreconditionError("symbol out of range for " + name);
    fixed.emplace_back(vi, val);
  }
  Rat total = 0;
  std::vector<int> idx;
  for (size_t r = 0; r < probs_.size(); ++r) {
    if (sgn(probs_[r]) == 0) continue;
    unrank(r, idx);
    bool match = true;
    for (auto& [vi, val] : fixed)
      if (idx[vi] != val) { match = false; break; }
    if (match) total += probs_[r];
  }
  return total;
}

JointDist JointDist::marginal(const std::vector<std::string>& keep) const {
  if (keep.empty()) throw PreconditionError("marginal needs at least one variable");
  auto ki = indices_of(keep);
  std::vector<Var> new_vars;
  size_t total = 1;
  for (int i : ki) {
    new_vars.push_back(vars_[i]);
    total *= size_t(vars_[i].size);
  }
  std::vector<size_t> new_strides(ki.size(), 1);
  for (int i = int(ki.size()) - 2; i >= 0; --i)
    new_strides[i] = new_strides[i + 1] * size_t(new_vars[i + 1].size);
  std::vector<Rat> out(total, Rat(0));
  std::vector<int> idx;
  for (size_t r = 0; r < probs_.size(); ++r) {
    if (sgn(probs_[r]) == 0) continue;
    unrank(r, idx);
    size_t nr = 0;
    for (size_t k = 0; k < ki.size(); ++k) nr += size_t(idx[ki[k]]) * new_strides[k];
    out[nr] += probs_[r];
  }
  return JointDist(std::move(new_vars), std::move(out));
}

JointDist JointDist::condition(const Assignment& given) const {
  Rat pg = mass(given);
  if (sgn(pg) == 0) throw PreconditionError("conditioning on a zero-probability assignment");
  std::vector<int> given_idx(vars_.size(), -1);
  size_t rest_count = 0;
  for (size_t i = 0; i < vars_.size(); ++i) {
    if (given.has(vars_[i].name))
      given_idx[i] = given.at(vars_[i].name);
    else
      ++rest_count;
  }
  if (rest_count == 0) throw PreconditionError("conditioning on every variable leaves nothing");
  std::vector<Var> new_vars;
  for (size_t i = 0; i < vars_.size(); ++i)
    if (given_idx[i] < 0) new_vars.push_back(vars_[i]);
  size_t total = 1;
  for (const auto& v : new_vars) total *= size_t(v.size);
  std::vector<Rat> out(total, Rat(0));
  std::vector<size_t> new_strides(new_vars.size(), 1);
  for (int i = int(new_vars.size()) - 2; i >= 0; --i)
    new_strides[i] = new_strides[i + 1] * size_t(new_vars[i + 1].size);
  std::vector<int> idx;
  for (size_t r = 0; r < probs_.size(); ++r) {
    if (sgn(probs_[r]) == 0) continue;
    unrank(r, idx);
    bool match = true;
    size_t nr = 0, k = 0;
    for (size_t i = 0; i < vars_.size(); ++i) {
      if (given_idx[i] >= 0) {
        if (idx[i] != given_idx[i]) { match = false; break; }
      } else {
        nr += size_t(idx[i]) * new_strides[k++];
      }
    }
    if (match) out[nr] += probs_[r];
  }
  for (auto& p : out) p /= pg;
  return JointDist(std::move(new_vars), std::move(out));
}

JointDist JointDist::restrict(const EventSet& g) const {
  Rat pg = mass(g);
  if (sgn(pg) == 0) throw PreconditionError("restriction to a zero-mass event");
  auto gi = indices_of(g.vars);
  std::vector<Rat> out(probs_.size(), Rat(0));
  std::vector<int> idx, sub(gi.size());
  for (size_t r = 0; r < probs_.size(); ++r) {
    if (sgn(probs_[r]) == 0) continue;
    unrank(r, idx);
    for (size_t k = 0; k < gi.size(); ++k) sub[k] = idx[gi[k]];
    if (g.contains(sub)) out[r] = probs_[r] / pg;
  }
  return JointDist(vars_, std::move(out));
}

JointDist JointDist::pushforward(const std::string& var, const std::vector<int>& f, int new_size) const {
  int vi = var_index(var);
  if (int(f.size()) != vars_[vi].size) throw PreconditionError("map not total on alphabet of " + var);
  for (int y : f)
    if (y < 0 || y >= new_size) throw PreconditionError("map value out of range");
  std::vector<Var> new_vars = vars_;
  new_vars[vi].size = new_size;
  size_t total = probs_.size() / size_t(vars_[vi].size) * size_t(new_size);
  std::vector<Rat> out(total, Rat(0));
  JointDist shell(new_vars, std::vector<Rat>(total, Rat(1, static_cast<unsigned long>(total))));
  std::vector<int> idx;
  for (size_t r = 0; r < probs_.size(); ++r) {
    if (sgn(probs_[r]) == 0) continue;
    unrank(r, idx);
    idx[vi] = f[idx[vi]];
    out[shell.rank(idx)] += probs_[r];
  }
  return JointDist(std::move(new_vars), std::move(out));
}

JointDist JointDist::reorder(const std::vector<std::string>& new_order) const {
  if (new_order.size() != vars_.size()) throw PreconditionError("reorder must list every variable");
  auto oi = indices_of(new_order);
  std::vector<Var> new_vars;
  for (int i : oi) new_vars.push_back(vars_[i]);
  size_t total = probs_.size();
  JointDist shell(new_vars, std::vector<Rat>(total, Rat(1, static_cast<unsigned long>(total))));
  std::vector<Rat> out(total, Rat(0));
  std::vector<int> idx, nidx(vars_.size());
  for (size_t r = 0; r < probs_.size(); ++r) {
    unrank(r, idx);
    for (size_t k = 0; k < oi.size(); ++k) nidx[k] = idx[oi[k]];
    out[shell.rank(nidx)] = probs_[r];
  }
  return JointDist(std::move(new_vars), std::move(out));
}

bool JointDist::is_markov(const std::vector<std::string>& left, const std::vector<std::string>& mid,
                          const std::vector<std::string>& right) const {
  std::set<std::string> seen;
  for (const auto* grp : {&left, &mid, &right})
    for (const auto& n : *grp) {
      var_index(n);
      if (!seen.insert(n).second) throw PreconditionError("overlapping variable groups: " + n);
    }
  std::vector<std::string> all;
  all.insert(all.end(), left.begin(), left.end());
  all.insert(all.end(), mid.begin(), mid.end());
  all.insert(all.end(), right.begin(), right.end());
  JointDist lmr = marginal(all);  // order: left, mid, right

  std::vector<std::string> lm(left), mr(mid), m(mid);
  lm.insert(lm.end(), mid.begin(), mid.end());
  mr.insert(mr.end(), right.begin(), right.end());
  // mr is (mid, right); build marginals once.
  JointDist d_lm = lmr.marginal(lm);
  JointDist d_mr = lmr.marginal(mr);
  JointDist d_m = mid.empty() ? JointDist() : lmr.marginal(m);

  size_t nl = 1, nm = 1, nr = 1;
  for (const auto& n : left) nl *= size_t(var_size(n));
  for (const auto& n : mid) nm *= size_t(var_size(n));
  for (const auto& n : right) nr *= size_t(var_size(n));

  // Cross-product test per mid-cell: p(l,m,r) * p(m) == p(l,m) * p(m,r).
  for (size_t im = 0; im < nm; ++im) {
    Rat pm = mid.empty() ? Rat(1) : d_m.probs()[im];
    if (sgn(pm) == 0) continue;
    for (size_t il = 0; il < nl; ++il) {
      const Rat& plm = d_lm.probs()[il * nm + im];
      for (size_t ir = 0; ir < nr; ++ir) {
        const Rat& pmr = d_mr.probs()[im * nr + ir];
        const Rat& plmr = lmr.probs()[(il * nm + im) * nr + ir];
        if (plmr * pm != plm * pmr) return false;
      }
    }
  }
  return true;
}

void JointDist::for_each_support(
    const std::function<void(const std::vector<int>&, const Rat&)>& fn) const {
  std::vector<int> idx;
  for (size_t r = 0; r < probs_.size(); ++r) {
    if (sgn(probs_[r]) == 0) continue;
    unrank(r, idx);
    fn(idx, probs_[r]);
  }
}

Rat l1_dist(const JointDist& a, const JointDist& b) {
  if (!a.same_schema(b)) throw PreconditionError("schema mismatch in l1 distance");
  Rat sum = 0;
  for (size_t r = 0; r < a.probs().size(); ++r) sum += abs(a.probs()[r] - b.probs()[r]);
  return sum;
}

Rat tv_half(const JointDist& a, const JointDist& b) { return l1_dist(a, b) / 2; }

double kl_bits(const JointDist& a, const JointDist& b) {
  if (!a.same_schema(b)) throw PreconditionError("schema mismatch in KL");
  double sum = 0;
  for (size_t r = 0; r < a.probs().size(); ++r) {
    const Rat& p = a.probs()[r];
    if (sgn(p) == 0) continue;  // 0 log(0/0) = 0 convention
    const Rat& q = b.probs()[r];
    if (sgn(q) == 0) return std::numeric_limits<double>::infinity();
    sum += rat_double(p) * rat_log2(Rat(p / q));
  }
  return sum;
}

JointDist extend_with_kernel(const JointDist& d, const std::string& depends_on,
                             const std::string& new_var,
                             const std::vector<std::vector<Rat>>& kernel_in) {
  int di = d.var_index(depends_on);
  int dsize = d.vars()[di].size;
  // canonicalize defensively: raw mpq(n,d) literals may arrive unreduced,
  // and rational equality assumes canonical form
  std::vector<std::vector<Rat>> kernel = kernel_in;
  for (auto& row : kernel)
    for (auto& p : row) p.canonicalize();
  if (int(kernel.size()) != dsize) throw PreconditionError("kernel row count != alphabet of " + depends_on);
  int nsize = -1;
  for (const auto& row : kernel) {
    if (row.empty()) continue;
    if (nsize < 0) nsize = int(row.size());
    if (int(row.size()) != nsize) throw PreconditionError("kernel rows have unequal lengths");
  }
  if (nsize <= 0) throw PreconditionError("kernel has no rows");
  JointDist base_marg = d.marginal({depends_on});
  for (int s = 0; s < dsize; ++s) {
    if (kernel[s].empty()) {
      if (sgn(base_marg.probs()[s]) != 0)
        throw PreconditionError("kernel row missing for positive-mass symbol");
      continue;
    }
    Rat sum = 0;
    for (const auto& p : kernel[s]) {
      if (sgn(p) < 0) throw PreconditionError("negative kernel entry");
      sum += p;
    }
    if (sum != 1 && sgn(base_marg.probs()[s]) != 0)
      throw PreconditionError("kernel row does not sum to 1");
  }
  std::vector<Var> vars = d.vars();
  vars.push_back({new_var, nsize});
  std::vector<Rat> probs;
  probs.reserve(d.tensor_size() * size_t(nsize));
  std::vector<int> idx;
  for (size_t r = 0; r < d.tensor_size(); ++r) {
    d.unrank(r, idx);
    const auto& row = kernel[idx[di]];
    for (int t = 0; t < nsize; ++t) {
      if (sgn(d.probs()[r]) == 0 || row.empty())
        probs.push_back(Rat(0));
      else
        probs.push_back(d.probs()[r] * row[t]);
    }
  }
  return JointDist(std::move(vars), std::move(probs));
}

std::vector<std::vector<Rat>> conditional_kernel(const JointDist& d,
                                                 const std::vector<std::string>& target,
                                                 const std::vector<std::string>& given) {
  std::vector<std::string> both(given);
  both.insert(both.end(), target.begin(), target.end());
  JointDist j = d.marginal(both);      // order: given, target
  JointDist g = d.marginal(given);
  size_t ng = g.tensor_size();
  size_t nt = j.tensor_size() / ng;
  std::vector<std::vector<Rat>> rows(ng, std::vector<Rat>(nt, Rat(0)));
  for (size_t a = 0; a < ng; ++a) {
    if (sgn(g.probs()[a]) == 0) continue;
    for (size_t b = 0; b < nt; ++b) rows[a][b] = j.probs()[a * nt + b] / g.probs()[a];
  }
  return rows;
}

DistSampler::DistSampler(const JointDist& d) {
  cdf_.reserve(d.tensor_size());
  Rat acc = 0;
  Rat scale = rat_pow2(64);
  for (const auto& p : d.probs()) {
    acc += p;
    Rat scaled = acc * scale;
    Int fl = rat_floor(scaled);
    uint64_t t;
    if (mpz_sizeinbase(fl.get_mpz_t(), 2) > 64)
      t = UINT64_MAX;
    else
      t = uint64_t(mpz_get_ui(fl.get_mpz_t()));
    cdf_.push_back(t);
  }
  if (!cdf_.empty()) cdf_.back() = UINT64_MAX;
}

size_t DistSampler::sample(RngStream& rng) const {
  uint64_t u = rng.next();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return size_t(it - cdf_.begin());
}

}  // namespace oneshot
