#pragma once
// Exact finite joint distributions: named variables, dense rational tensor,
// marginalization / conditioning / restriction / products / pushforwards,
// total-variation and KL, and exact Markov-chain tests.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "oneshot/rational.hpp"
#include "oneshot/rng.hpp"

namespace oneshot {

struct Var {
  std::string name;
  int size = 0;
};

// Partial assignment of symbols (0-based) to named variables.
struct Assignment {
  std::map<std::string, int> values;

  Assignment() = default;
  Assignment(std::initializer_list<std::pair<const std::string, int>> init) : values(init) {}
  bool has(const std::string& v) const { return values.count(v) > 0; }
  int at(const std::string& v) const { return values.at(v); }
};

// An event over a subset of variables, given by an explicit set of sub-tuples.
struct EventSet {
  std::vector<std::string> vars;
  std::set<std::vector<int>> members;

  bool contains(const std::vector<int>& sub) const { return members.count(sub) > 0; }
};

class JointDist {
 public:
  JointDist() = default;
  // Validates: unique names, positive sizes, len == prod(sizes),
  // entries >= 0, exact sum == 1.
  JointDist(std::vector<Var> vars, std::vector<Rat> probs);

  static JointDist uniform(std::vector<Var> vars);
  static JointDist point_mass(std::vector<Var> vars, const std::vector<int>& symbol);
  // Independent product; variable names must not collide.
  static JointDist product(const JointDist& a, const JointDist& b);

  const std::vector<Var>& vars() const { return vars_; }
  const std::vector<Rat>& probs() const { return probs_; }
  size_t tensor_size() const { return probs_.size(); }
  int arity() const { return int(vars_.size()); }

  int var_index(const std::string& name) const;  // throws on unknown name
  int var_size(const std::string& name) const { return vars_[var_index(name)].size; }
  bool same_schema(const JointDist& o) const;

  // Row-major rank/unrank.
  size_t rank(const std::vector<int>& idx) const;
  void unrank(size_t r, std::vector<int>& idx) const;

  const Rat& prob(const std::vector<int>& idx) const { return probs_[rank(idx)]; }
  Rat prob(const Assignment& full) const;

  // Probability of an event over a variable subset.
  Rat mass(const EventSet& g) const;
  // Probability of a partial assignment.
  Rat mass(const Assignment& partial) const;

  JointDist marginal(const std::vector<std::string>& keep) const;
  // (rest | given); error when Pr[given] == 0 or nothing remains.
  JointDist condition(const Assignment& given) const;
  // Restriction to an event with positive mass (Fact on restrictions applies).
  JointDist restrict(const EventSet& g) const;
  // Applies f to one variable's alphabet; preimages are summed.
  JointDist pushforward(const std::string& var, const std::vector<int>& f, int new_size) const;
  JointDist reorder(const std::vector<std::string>& new_order) const;

  // Exact test that `left` and `right` are independent given every
  // positive-mass assignment of `mid` (groups must be disjoint).
  bool is_markov(const std::vector<std::string>& left, const std::vector<std::string>& mid,
                 const std::vector<std::string>& right) const;

  // Support iteration: calls fn(idx, p) for every positive entry.
  void for_each_support(const std::function<void(const std::vector<int>&, const Rat&)>& fn) const;

 private:
  std::vector<Var> vars_;
  std::vector<Rat> probs_;
  std::vector<size_t> strides_;

  void build_strides();
  std::vector<int> indices_of(const std::vector<std::string>& names) const;
};

// Half the l1 distance (the error metric everywhere); schemas must match.
Rat tv_half(const JointDist& a, const JointDist& b);
// l1 distance.
Rat l1_dist(const JointDist& a, const JointDist& b);
// KL divergence in bits; +inf when supp(a) is not inside supp(b).
double kl_bits(const JointDist& a, const JointDist& b);

// Extends d with a new variable whose conditional law depends on one
// existing variable: kernel[s] is the distribution of the new variable
// given depends_on = s. Rows for zero-mass symbols may be empty (uniform
// placeholder is used; they never contribute mass).
JointDist extend_with_kernel(const JointDist& d, const std::string& depends_on,
                             const std::string& new_var, const std::vector<std::vector<Rat>>& kernel);

// Conditional kernel p_{target | given}: row per joint symbol of `given`,
// zero rows where Pr[given]=0. Returned as [given-rank][target-rank].
std::vector<std::vector<Rat>> conditional_kernel(const JointDist& d, const std::vector<std::string>& target,
                                                 const std::vector<std::string>& given);

// Faithful-to-2^-64 sampler with exact rational thresholds precomputed.
class DistSampler {
 public:
  explicit DistSampler(const JointDist& d);
  // Returns tensor rank of the sampled cell.
  size_t sample(RngStream& rng) const;

 private:
  std::vector<uint64_t> cdf_;  // scaled cumulative thresholds
};

}  // namespace oneshot
