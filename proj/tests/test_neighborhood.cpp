#include <catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "helpers.hpp"
#include "rsc/branching.hpp"
#include "rsc/components.hpp"
#include "rsc/neighborhood.hpp"

using rsc::ComplexD;
using rsc::RootedNeighborhood;
using rsc::Simplex;
using rsc::Vertex;
using testing_helpers::closure;

namespace {

RootedNeighborhood rooted(int d, const std::vector<Simplex>& gens, const Simplex& root, std::uint32_t n = 0) {
  std::vector<Simplex> all = gens;
  all.push_back(root);
  return rsc::make_rooted(closure(d, all, n), root);
}

RootedNeighborhood relabeled(const RootedNeighborhood& a, const std::vector<Vertex>& perm) {
  return rsc::make_rooted(testing_helpers::relabel(a.complex, perm), testing_helpers::relabel(a.root, perm));
}

std::vector<Vertex> shuffled(std::uint32_t n, std::mt19937_64& rng) {
  std::vector<Vertex> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// |Aut| by brute force: vertex permutations fixing the root set and every simplex set.
std::uint64_t brute_automorphisms(const RootedNeighborhood& a) {
  std::vector<Vertex> verts;
  a.complex.skeleton(0).for_each([&](std::uint64_t, const Simplex& s) { verts.push_back(s[0]); });
  std::vector<Vertex> img = verts;
  std::uint64_t count = 0;
  do {
    std::map<Vertex, Vertex> m;
    for (std::size_t i = 0; i < verts.size(); ++i) m[verts[i]] = img[i];
    auto map = [&](const Simplex& s) {
      std::vector<Vertex> v;
      for (auto u : s) v.push_back(m[u]);
      return Simplex(v);
    };
    if (map(a.root) != a.root) continue;
    bool ok = true;
    for (int k = 1; k <= a.d() && ok; ++k)
      a.complex.skeleton(k).for_each([&](std::uint64_t, const Simplex& s) { ok = ok && a.complex.contains(map(s)); });
    count += ok;
  } while (std::next_permutation(img.begin(), img.end()));
  return count;
}

}  // namespace

TEST_CASE("radius zero is the root closure") {
  auto x = closure(2, {Simplex{1, 2, 3}, Simplex{2, 3, 4}});
  auto b = rsc::neighborhood(x, Simplex{1, 2}, 0);
  CHECK(b.complex.count(0) == 2);
  CHECK(b.complex.count(1) == 1);
  CHECK(b.complex.count(2) == 0);
  CHECK(b.layer(Simplex{1, 2}) == 0);
  CHECK_THROWS_AS(rsc::neighborhood(x, Simplex{1, 4}, 1), rsc::membership_error);
}

TEST_CASE("radius one around an edge of two triangles") {
  auto x = closure(2, {Simplex{1, 2, 3}, Simplex{2, 3, 4}});
  auto b = rsc::neighborhood(x, Simplex{1, 2}, 1);
  CHECK(b.complex.count(2) == 1);
  CHECK(b.complex.contains(Simplex{1, 2, 3}));
  CHECK(b.complex.contains(Simplex{1, 3}));
  CHECK(b.complex.contains(Simplex{2, 3}));
  CHECK_FALSE(b.complex.contains(Simplex{2, 4}));
  CHECK_FALSE(b.complex.contains(Simplex{3, 4}));
  CHECK(b.layer(Simplex{2, 3}) == 1);
  CHECK_FALSE(b.saturated);
  auto b2 = rsc::neighborhood(x, Simplex{1, 2}, 2);
  CHECK(b2.complex.count(1) == 5);
  CHECK(b2.saturated);
}

TEST_CASE("large radius gives the whole component") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto x = testing_helpers::random_lm(14, 2, 0.06, 500 + s);
    auto rep = rsc::component_map(x);
    rsc::CofacetIndex idx(x);
    const Simplex root = x.ridges().at(s % x.ridges().size());
    auto b = rsc::neighborhood(x, idx, root, 1000);
    CHECK(b.saturated);
    std::uint64_t same = 0;
    const auto label = rep.label_of(*x.ridge_id(root));
    for (auto l : rep.labels) same += l == label;
    CHECK(b.complex.count(1) == same);
    b.complex.ridges().for_each([&](std::uint64_t, const Simplex& e) { CHECK(rep.label_of(*x.ridge_id(e)) == label); });
  }
}

TEST_CASE("layer structure of balls") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto x = testing_helpers::random_lm(20, 2, 0.05, 700 + s);
    rsc::CofacetIndex idx(x);
    const Simplex root = x.ridges().at((s * 37) % x.ridges().size());
    for (int r = 0; r <= 3; ++r) {
      auto b = rsc::neighborhood(x, idx, root, r);
      CHECK(b.complex.validate().empty());
      int zero = 0;
      for (auto l : b.layer_of) {
        CHECK(l <= r);
        zero += l == 0;
      }
      CHECK(zero == 1);
      CHECK(b.layer(root) == 0);
      b.complex.tops().for_each([&](std::uint64_t, const Simplex& t) {
        int lo = 1 << 20, hi = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
          const int l = b.layer(t.without_index(i));
          lo = std::min(lo, l);
          hi = std::max(hi, l);
        }
        CHECK(hi - lo <= 1);
      });
    }
  }
}

TEST_CASE("rooted isomorphism basics") {
  auto a = rooted(2, {Simplex{0, 1, 2}, Simplex{0, 1, 3}}, Simplex{0, 1});
  auto b = rooted(2, {Simplex{0, 1, 2}, Simplex{0, 1, 3}, Simplex{0, 1, 4}}, Simplex{0, 1});
  CHECK(rsc::rooted_isomorphic(a, a));
  CHECK_FALSE(rsc::rooted_isomorphic(a, b));
  CHECK(rsc::canonical_code(a) != rsc::canonical_code(b));
  auto c = relabeled(a, {7, 3, 5, 0, 1, 2, 4, 6});
  CHECK(rsc::rooted_isomorphic(a, c));
  CHECK(rsc::canonical_code(a) == rsc::canonical_code(c));
  // Same complex, root on a different orbit.
  auto x = closure(2, {Simplex{0, 1, 2}, Simplex{1, 2, 3}});
  auto r1 = rsc::make_rooted(x, Simplex{0, 1});
  auto r2 = rsc::make_rooted(x, Simplex{1, 2});
  CHECK_FALSE(rsc::rooted_isomorphic(r1, r2));
  CHECK(rsc::canonical_code(r1) != rsc::canonical_code(r2));
}

TEST_CASE("bare root code is constant per dimension") {
  for (int d = 1; d <= 4; ++d) {
    std::vector<Vertex> v(static_cast<std::size_t>(d)), w(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      v[static_cast<std::size_t>(i)] = static_cast<Vertex>(i);
      w[static_cast<std::size_t>(i)] = static_cast<Vertex>(10 + 3 * i);
    }
    auto a = rsc::make_rooted(rsc::downward_closure(Simplex(v), d), Simplex(v));
    auto b = rsc::make_rooted(rsc::downward_closure(Simplex(w), d), Simplex(w));
    CHECK(rsc::canonical_code(a) == rsc::canonical_code(b));
  }
}

TEST_CASE("tree code keeps track of which root vertex a branch hangs from") {
  // Root {0,1}; triangles {0,1,2} and {0,1,3}. In A the second-layer
  // triangles hang from {1,2} and {0,3}; in B from {1,2} and {1,3}.
  auto a = rooted(2, {Simplex{0, 1, 2}, Simplex{0, 1, 3}, Simplex{1, 2, 4}, Simplex{0, 3, 5}}, Simplex{0, 1});
  auto b = rooted(2, {Simplex{0, 1, 2}, Simplex{0, 1, 3}, Simplex{1, 2, 4}, Simplex{1, 3, 5}}, Simplex{0, 1});
  REQUIRE(rsc::as_tree(a));
  REQUIRE(rsc::as_tree(b));
  CHECK_FALSE(rsc::rooted_isomorphic(a, b));
  CHECK(rsc::canonical_code(a) != rsc::canonical_code(b));
  CHECK(rsc::general_code(a) != rsc::general_code(b));
}

TEST_CASE("non-trees are detected") {
  auto cyc = rooted(2, {Simplex{0, 1, 2}, Simplex{0, 2, 3}, Simplex{0, 1, 3}}, Simplex{0, 1});
  CHECK_FALSE(rsc::as_tree(cyc));
  auto extra_edge = rooted(2, {Simplex{0, 1, 2}, Simplex{2, 5}}, Simplex{0, 1});
  CHECK_FALSE(rsc::as_tree(extra_edge));
  auto tree = rooted(2, {Simplex{0, 1, 2}, Simplex{0, 2, 3}}, Simplex{0, 1});
  CHECK(rsc::as_tree(tree));
  CHECK(rsc::canonical_code(cyc)[0] == 'G');
  CHECK(rsc::canonical_code(tree)[0] == 'T');
}

namespace {

void check_classes(const std::vector<RootedNeighborhood>& all) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < all.size(); ++i) groups[rsc::canonical_code(all[i])].push_back(i);
  for (const auto& [code, members] : groups)
    for (auto i : members) REQUIRE(rsc::rooted_isomorphic(all[members.front()], all[i]));
  std::vector<std::size_t> reps;
  for (const auto& [code, members] : groups) reps.push_back(members.front());
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j) REQUIRE_FALSE(rsc::rooted_isomorphic(all[reps[i]], all[reps[j]]));
}

}  // namespace

TEST_CASE("codes separate isomorphism classes exhaustively on five vertices") {
  // All 2^10 sets of triangles on {0..4}, rooted at {0,1}, with either the
  // minimal 1-skeleton or the complete graph underneath.
  std::vector<Simplex> tris;
  for (Vertex a = 0; a < 5; ++a)
    for (Vertex b = a + 1; b < 5; ++b)
      for (Vertex c = b + 1; c < 5; ++c) tris.push_back(Simplex{a, b, c});
  std::vector<Simplex> edges;
  for (Vertex a = 0; a < 5; ++a)
    for (Vertex b = a + 1; b < 5; ++b) edges.push_back(Simplex{a, b});
  for (int full : {0, 1}) {
    std::vector<RootedNeighborhood> all;
    for (int mask = 0; mask < (1 << 10); ++mask) {
      std::vector<Simplex> gens;
      for (int i = 0; i < 10; ++i)
        if (mask >> i & 1) gens.push_back(tris[static_cast<std::size_t>(i)]);
      if (full) gens.insert(gens.end(), edges.begin(), edges.end());
      all.push_back(rooted(2, gens, Simplex{0, 1}, 5));
    }
    check_classes(all);
  }
}

TEST_CASE("codes on random seven-vertex complexes") {
  std::mt19937_64 rng(17);
  std::vector<RootedNeighborhood> all;
  for (int i = 0; i < 400; ++i) {
    std::vector<Simplex> gens;
    std::bernoulli_distribution tri(0.08 + 0.002 * (i % 50)), edge(0.2);
    for (Vertex a = 0; a < 7; ++a)
      for (Vertex b = a + 1; b < 7; ++b) {
        if (edge(rng)) gens.push_back(Simplex{a, b});
        for (Vertex c = b + 1; c < 7; ++c)
          if (tri(rng)) gens.push_back(Simplex{a, b, c});
      }
    auto a = rooted(2, gens, Simplex{0, 1}, 7);
    auto b = relabeled(a, shuffled(7, rng));
    REQUIRE(rsc::canonical_code(a) == rsc::canonical_code(b));
    REQUIRE(rsc::rooted_isomorphic(a, b));
    all.push_back(a);
    all.push_back(b);
  }
  check_classes(all);
}

TEST_CASE("codes in dimension three") {
  std::mt19937_64 rng(18);
  std::vector<RootedNeighborhood> all;
  for (int i = 0; i < 150; ++i) {
    std::vector<Simplex> gens;
    std::bernoulli_distribution tet(0.12);
    for (Vertex a = 0; a < 6; ++a)
      for (Vertex b = a + 1; b < 6; ++b)
        for (Vertex c = b + 1; c < 6; ++c)
          for (Vertex e = c + 1; e < 6; ++e)
            if (tet(rng)) gens.push_back(Simplex{a, b, c, e});
    auto a = rooted(3, gens, Simplex{0, 1, 2}, 6);
    auto b = relabeled(a, shuffled(6, rng));
    REQUIRE(rsc::canonical_code(a) == rsc::canonical_code(b));
    all.push_back(a);
    all.push_back(b);
  }
  check_classes(all);
}

TEST_CASE("tree and general codes induce the same classes on Poisson trees") {
  std::vector<RootedNeighborhood> trees;
  for (int d : {2, 3})
    for (std::uint64_t s = 0; s < 150; ++s)
      trees.push_back(rsc::sample_poisson_tree({d == 2 ? 0.6 : 0.35, d}, 2, rsc::Seed{900, s}));
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const auto ti = rsc::canonical_code(trees[i]);
    REQUIRE(ti[0] == 'T');
    for (std::size_t j = i + 1; j < trees.size(); ++j) {
      if (trees[i].d() != trees[j].d()) continue;
      const bool same_tree = ti == rsc::canonical_code(trees[j]);
      REQUIRE(same_tree == (rsc::general_code(trees[i]) == rsc::general_code(trees[j])));
    }
  }
}

TEST_CASE("codes read from the complex match codes of the extracted ball") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto x = testing_helpers::random_lm(40, 2, 1.2 / 40, 300 + s);
    rsc::CofacetIndex idx(x);
    for (std::uint64_t id = 0; id < x.ridges().size(); id += 7) {
      const auto root = x.ridges().at(id);
      for (int r = 1; r <= 3; ++r)
        REQUIRE(rsc::ball_code(x, idx, root, r) == rsc::canonical_code(rsc::neighborhood(x, idx, root, r)));
    }
  }
}

TEST_CASE("automorphism counts of trees") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    auto t = rsc::sample_poisson_tree({0.7, 2}, 2, rsc::Seed{950, s});
    if (t.complex.count(0) > 9) continue;
    auto tree = rsc::as_tree(t);
    REQUIRE(tree);
    CHECK(std::exp(rsc::log_automorphisms(*tree)) == Catch::Approx(static_cast<double>(brute_automorphisms(t))));
  }
  auto star = rooted(2, {Simplex{0, 1, 2}, Simplex{0, 1, 3}, Simplex{0, 1, 4}}, Simplex{0, 1});
  CHECK(std::exp(rsc::log_automorphisms(*rsc::as_tree(star))) == Catch::Approx(12.0));
  CHECK(brute_automorphisms(star) == 12);
}

TEST_CASE("rooted distance") {
  auto a = rooted(2, {Simplex{0, 1, 2}, Simplex{1, 2, 3}}, Simplex{0, 1});
  CHECK(rsc::rooted_distance(a, a, 5) == Catch::Approx(1.0 / 6));
  auto b = rooted(2, {Simplex{0, 1, 2}, Simplex{0, 1, 3}}, Simplex{0, 1});
  // First disagreement at radius 1: R* = 0.
  CHECK(rsc::rooted_distance(a, b, 5) == Catch::Approx(1.0));
  // Mirror image of a under 0 <-> 1.
  auto c = rooted(2, {Simplex{0, 1, 2}, Simplex{0, 2, 3}}, Simplex{0, 1});
  CHECK(rsc::rooted_distance(a, c, 5) == Catch::Approx(1.0 / 6));
  auto e = rooted(2, {Simplex{0, 1, 2}, Simplex{1, 2, 3}, Simplex{1, 2, 4}}, Simplex{0, 1});
  CHECK(rsc::rooted_distance(a, e, 5) == Catch::Approx(0.5));
  auto f = rooted(2, {Simplex{0, 1, 2}, Simplex{1, 2, 3}, Simplex{1, 3, 4}}, Simplex{0, 1});
  CHECK(rsc::rooted_distance(a, f, 5) == Catch::Approx(1.0 / 3));
  CHECK(rsc::rooted_distance(a, f, 1) == Catch::Approx(0.5));

  auto x = testing_helpers::random_lm(30, 2, 0.05, 77);
  rsc::CofacetIndex idx(x);
  auto ball = rsc::neighborhood(x, idx, x.ridges().at(0), 2);
  if (!ball.saturated) CHECK_THROWS_AS(rsc::rooted_distance(ball, ball, 3), rsc::domain_error);
}

TEST_CASE("rooted distance is an ultrametric") {
  std::vector<RootedNeighborhood> pool;
  for (std::uint64_t s = 0; s < 8; ++s) {
    auto x = testing_helpers::random_lm(25, 2, 1.0 / 25, 1100 + s);
    rsc::CofacetIndex idx(x);
    for (std::uint64_t id = 0; id < x.ridges().size(); id += 41) pool.push_back(rsc::neighborhood(x, idx, x.ridges().at(id), 3));
  }
  std::vector<std::vector<double>> dist(pool.size(), std::vector<double>(pool.size()));
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = 0; j < pool.size(); ++j) dist[i][j] = rsc::rooted_distance(pool[i], pool[j], 3);
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = 0; j < pool.size(); ++j)
      for (std::size_t k = 0; k < pool.size(); ++k) REQUIRE(dist[i][k] <= std::max(dist[i][j], dist[j][k]) + 1e-15);
}
