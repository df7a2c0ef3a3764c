#include "doctest.h"
#include "oneshot/batteries.hpp"
#include "oneshot/dist.hpp"
#include "oneshot/info.hpp"

using namespace oneshot;

namespace {

JointDist bits_dist(std::vector<Rat> probs) {
  return JointDist({{"X", 2}, {"Y", 2}}, std::move(probs));
}

}  // namespace

TEST_CASE("construction validates invariants") {
  CHECK_THROWS_AS(JointDist({{"X", 2}}, {Rat(1, 2)}), PreconditionError);
  CHECK_THROWS_AS(JointDist({{"X", 2}}, {Rat(3, 4), Rat(3, 4)}), PreconditionError);
  CHECK_THROWS_AS(JointDist({{"X", 2}}, {Rat(-1, 4), Rat(5, 4)}), PreconditionError);
  CHECK_THROWS_AS(JointDist({{"X", 2}, {"X", 2}},
                            {Rat(1, 4), Rat(1, 4), Rat(1, 4), Rat(1, 4)}),
                  PreconditionError);
}

TEST_CASE("marginal basics") {
  // product factorizes
  JointDist x({{"X", 2}}, {Rat(1, 3), Rat(2, 3)});
  JointDist y({{"Y", 3}}, {Rat(1, 2), Rat(1, 4), Rat(1, 4)});
  JointDist xy = JointDist::product(x, y);
  CHECK(tv_half(xy.marginal({"X"}), x) == 0);
  // uniform over {0,1}^2 marginalizes to a uniform bit
  JointDist u = JointDist::uniform({{"X", 2}, {"Y", 2}});
  CHECK(u.marginal({"X"}).probs()[0] == Rat(1, 2));
  // hand-summed rows: p(0,0)=1/2, p(0,1)=1/4, p(1,1)=1/4
  JointDist d = bits_dist({Rat(1, 2), Rat(1, 4), Rat(0), Rat(1, 4)});
  JointDist mx = d.marginal({"X"});
  CHECK(mx.probs()[0] == Rat(3, 4));
  CHECK(mx.probs()[1] == Rat(1, 4));
  CHECK_THROWS_AS(d.marginal({"W"}), PreconditionError);
}

TEST_CASE("condition basics") {
  JointDist x({{"X", 2}}, {Rat(1, 3), Rat(2, 3)});
  JointDist y({{"Y", 2}}, {Rat(1, 5), Rat(4, 5)});
  JointDist xy = JointDist::product(x, y);
  for (int v = 0; v < 2; ++v) {
    JointDist c = xy.condition(Assignment{{"X", v}});
    CHECK(tv_half(c, y) == 0);
  }
  // perfectly correlated bits
  JointDist corr = bits_dist({Rat(1, 2), Rat(0), Rat(0), Rat(1, 2)});
  JointDist c1 = corr.condition(Assignment{{"X", 1}});
  CHECK(c1.probs()[1] == 1);
  // normalize row 0 of the hand instance
  JointDist d = bits_dist({Rat(1, 2), Rat(1, 4), Rat(0), Rat(1, 4)});
  JointDist c0 = d.condition(Assignment{{"X", 0}});
  CHECK(c0.probs()[0] == Rat(2, 3));
  CHECK(c0.probs()[1] == Rat(1, 3));
  // zero-probability conditioning event
  CHECK_THROWS_AS(d.condition(Assignment{{"X", 1}, {"Y", 0}}), PreconditionError);
}

TEST_CASE("restriction identity is exact") {
  JointDist d = JointDist::uniform({{"X", 4}});
  EventSet g;
  g.vars = {"X"};
  g.members = {{0}, {1}};
  JointDist r = d.restrict(g);
  CHECK(r.probs()[0] == Rat(1, 2));
  CHECK(tv_half(d, r) == Rat(1, 2));
  // full support leaves the distribution unchanged
  EventSet full;
  full.vars = {"X"};
  full.members = {{0}, {1}, {2}, {3}};
  CHECK(tv_half(d, d.restrict(full)) == 0);
  // point mass inside the event is unchanged
  JointDist pm = JointDist::point_mass({{"X", 4}}, {1});
  CHECK(tv_half(pm, pm.restrict(g)) == 0);
  EventSet empty;
  empty.vars = {"X"};
  CHECK_THROWS_AS(d.restrict(empty), PreconditionError);
}

TEST_CASE("tv basics") {
  JointDist a({{"X", 2}}, {Rat(1, 2), Rat(1, 2)});
  JointDist b({{"X", 2}}, {Rat(3, 4), Rat(1, 4)});
  CHECK(tv_half(a, a) == 0);
  CHECK(tv_half(a, b) == Rat(1, 4));
  JointDist p0 = JointDist::point_mass({{"X", 2}}, {0});
  JointDist p1 = JointDist::point_mass({{"X", 2}}, {1});
  CHECK(tv_half(p0, p1) == 1);
  JointDist c({{"Y", 2}}, {Rat(1, 2), Rat(1, 2)});
  CHECK_THROWS_AS(tv_half(a, c), PreconditionError);
}

TEST_CASE("kl basics") {
  JointDist u = JointDist::uniform({{"X", 8}});
  JointDist pm = JointDist::point_mass({{"X", 8}}, {3});
  CHECK(kl_bits(u, u) == doctest::Approx(0));
  CHECK(kl_bits(pm, u) == doctest::Approx(3));  // log2 8
  CHECK(std::isinf(kl_bits(u, pm)));
}

TEST_CASE("markov tests are exact") {
  JointDist xyz = JointDist::uniform({{"X", 2}, {"Y", 2}, {"Z", 2}});
  CHECK(xyz.is_markov({"X"}, {"Y"}, {"Z"}));
  CHECK(xyz.is_markov({"X"}, {}, {"Z"}));
  // M deterministic given X: M - X - Z
  JointDist x({{"X", 2}}, {Rat(1, 3), Rat(2, 3)});
  JointDist xz = extend_with_kernel(x, "X", "Z", {{Rat(1, 2), Rat(1, 2)}, {Rat(1, 4), Rat(3, 4)}});
  JointDist xzm = extend_with_kernel(xz, "X", "M", {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
  CHECK(xzm.is_markov({"M"}, {"X"}, {"Z"}));
  // three exact copies: M - (nothing) - Z fails
  JointDist copies({{"X", 2}, {"M", 2}, {"Z", 2}},
                   {Rat(1, 2), 0, 0, 0, 0, 0, 0, Rat(1, 2)});
  CHECK_FALSE(copies.is_markov({"M"}, {}, {"Z"}));
  CHECK_THROWS_AS(xyz.is_markov({"X"}, {"X"}, {"Z"}), PreconditionError);
}

TEST_CASE("pushforward basics") {
  JointDist u4 = JointDist::uniform({{"X", 4}});
  JointDist id = u4.pushforward("X", {0, 1, 2, 3}, 4);
  CHECK(tv_half(id, u4) == 0);
  JointDist c = u4.pushforward("X", {0, 0, 0, 0}, 1);
  CHECK(c.probs()[0] == 1);
  JointDist parity = u4.pushforward("X", {0, 1, 0, 1}, 2);
  CHECK(parity.probs()[0] == Rat(1, 2));
}

TEST_CASE("exactness: conditional times marginal reconstructs the joint") {
  RngStream rng(7);
  for (int it = 0; it < 20; ++it) {
    JointDist d = random_dist(rng, {{"X", 3}, {"Y", 4}});
    JointDist px = d.marginal({"X"});
    auto k = conditional_kernel(d, {"Y"}, {"X"});
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 4; ++y) {
        Rat expect = d.probs()[size_t(x) * 4 + y];
        Rat got = px.probs()[x] * (sgn(px.probs()[x]) ? k[x][y] : Rat(0));
        CHECK(got == expect);
      }
  }
}

TEST_CASE("random restriction identity battery") {
  auto rep = run_lemma_suite("restriction", 99, 60);
  CHECK(rep.failures == 0);
}

TEST_CASE("monotonicity and pinsker batteries") {
  CHECK(run_lemma_suite("monotone", 5, 60).failures == 0);
  CHECK(run_lemma_suite("pinsker", 6, 60).failures == 0);
}

TEST_CASE("sampler hits exact rational frequencies") {
  JointDist d({{"X", 3}}, {Rat(1, 2), Rat(1, 3), Rat(1, 6)});
  DistSampler s(d);
  RngStream rng(42);
  std::vector<long> cnt(3, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) cnt[s.sample(rng)]++;
  for (int v = 0; v < 3; ++v) {
    double p = rat_double(d.probs()[v]);
    double sigma = std::sqrt(p * (1 - p) * n);
    CHECK(std::abs(cnt[v] - p * n) < 5 * sigma);
  }
}
