#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rsc/complex.hpp"
#include "rsc/errors.hpp"
#include "rsc/simplex.hpp"

namespace rsc {

/// A finite complex with a distinguished (d-1)-simplex.
///
/// `layer_of[id]` is the d-dimensional graph distance from the root to the
/// ridge with that id in `complex`. `saturated` means no ridge at the outer
/// layer had cofacets outside the ball, so the ball is the root's whole
/// component and truncating it at any larger radius returns it unchanged.
struct RootedNeighborhood {
  ComplexD complex;
  Simplex root;
  int radius = 0;
  bool saturated = false;
  std::vector<int> layer_of;

  int d() const { return complex.d(); }

  int layer(const Simplex& ridge) const {
    auto id = complex.ridge_id(ridge);
    if (!id) throw membership_error(ridge.str() + " not in neighborhood");
    return layer_of[*id];
  }
};

namespace detail {

inline constexpr int kUnreached = std::numeric_limits<int>::max();

// BFS distances over ridges reachable from `root_id`, up to `max_layer`.
template <typename Cofacets>
std::unordered_map<std::uint64_t, int> ridge_layers(const ComplexD& x, std::uint64_t root_id, int max_layer,
                                                    Cofacets&& cofacets, bool* saturated) {
  std::unordered_map<std::uint64_t, int> dist{{root_id, 0}};
  std::deque<std::uint64_t> q{root_id};
  const auto& ridges = x.ridges();
  const auto& tops = x.tops();
  bool sat = true;
  while (!q.empty()) {
    const auto f = q.front();
    q.pop_front();
    const int df = dist[f];
    auto cof = cofacets(f);
    if (df >= max_layer) {
      if (!cof.empty()) {
        // A cofacet reaching back to a ridge below the outer layer is already in the ball.
        for (auto t : cof) {
          const Simplex top = tops.at(t);
          bool inside = false;
          for (std::size_t i = 0; i < top.size() && !inside; ++i) {
            auto it = dist.find(*ridges.index_of(top.without_index(i)));
            inside = it != dist.end() && it->second < max_layer;
          }
          if (!inside) sat = false;
        }
      }
      continue;
    }
    for (auto t : cof) {
      const Simplex top = tops.at(t);
      for (std::size_t i = 0; i < top.size(); ++i) {
        const auto g = *ridges.index_of(top.without_index(i));
        if (dist.try_emplace(g, df + 1).second) q.push_back(g);
      }
    }
  }
  if (saturated) *saturated = sat;
  return dist;
}

}  // namespace detail

/// B_X(root; r): the root's closure plus the closure of every d-simplex that
/// contains a ridge at distance < r from the root.
inline RootedNeighborhood neighborhood(const ComplexD& x, const CofacetIndex& index, const Simplex& root, int r) {
  if (r < 0) throw domain_error("neighborhood radius must be non-negative");
  const auto root_id = x.require_ridge(root);
  bool saturated = false;
  auto dist = detail::ridge_layers(x, root_id, r, [&](std::uint64_t f) { return index.cofacets(f); }, &saturated);
  std::vector<Simplex> gens{root};
  std::unordered_set<std::uint32_t> seen_tops;
  for (const auto& [f, df] : dist)
    if (df < r)
      for (auto t : index.cofacets(f))
        if (seen_tops.insert(t).second) gens.push_back(x.tops().at(t));
  RootedNeighborhood out;
  out.complex = ComplexD::from_simplices(x.n(), x.d(), gens);
  out.root = root;
  out.radius = r;
  out.saturated = saturated;
  out.layer_of.resize(out.complex.ridges().size(), detail::kUnreached);
  out.complex.ridges().for_each([&](std::uint64_t id, const Simplex& s) {
    out.layer_of[id] = dist.at(*x.ridges().index_of(s));
  });
  return out;
}

inline RootedNeighborhood neighborhood(const ComplexD& x, const Simplex& root, int r) {
  return neighborhood(x, CofacetIndex(x), root, r);
}

/// Wraps an arbitrary complex and root; the radius is the root's eccentricity.
inline RootedNeighborhood make_rooted(ComplexD x, const Simplex& root) {
  if (root.dim() != x.d() - 1) throw dimension_error("root must be a (d-1)-simplex");
  const auto root_id = x.require_ridge(root);
  CofacetIndex index(x);
  auto dist = detail::ridge_layers(x, root_id, detail::kUnreached - 1,
                                   [&](std::uint64_t f) { return index.cofacets(f); }, nullptr);
  RootedNeighborhood out;
  out.root = root;
  out.saturated = true;
  out.layer_of.assign(x.ridges().size(), detail::kUnreached);
  int ecc = 0;
  for (const auto& [f, df] : dist) {
    out.layer_of[f] = df;
    ecc = std::max(ecc, df);
  }
  out.radius = ecc;
  out.complex = std::move(x);
  return out;
}

/// Truncation of a rooted neighborhood to a smaller radius.
inline RootedNeighborhood truncate(const RootedNeighborhood& a, int r) {
  if (r > a.radius && !a.saturated)
    throw domain_error("cannot truncate a radius-" + std::to_string(a.radius) + " ball to radius " +
                       std::to_string(r));
  auto out = neighborhood(a.complex, a.root, std::min(r, a.radius));
  if (r >= a.radius) {
    out.radius = r;
    out.saturated = a.saturated;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tree-shaped rooted complexes

/// A (d-1)-rooted complex in which every d-simplex brings one new vertex.
///
/// Each node is a ridge. Its vertex tuple is kept in an inherited order:
/// the root is sorted, and the child of a cofacet that replaces position i
/// of its parent has the new vertex at position i. Positions therefore track
/// vertex lineages, which is what makes the recursive encoding exact.
struct RootedTree {
  struct Cofacet {
    Vertex w = 0;
    std::array<std::uint32_t, kMaxVertices> child{};
  };
  struct Node {
    std::array<Vertex, kMaxVertices> tuple{};
    int depth = 0;
    std::vector<Cofacet> cofacets;
  };

  int d = 0;
  std::vector<Node> nodes;  // nodes[0] is the root

  std::size_t top_count() const { return (nodes.size() - 1) / static_cast<std::size_t>(d); }
  int depth() const {
    int m = 0;
    for (const auto& n : nodes) m = std::max(m, n.depth);
    return m;
  }
};

namespace detail {

inline Simplex tuple_simplex(const std::array<Vertex, kMaxVertices>& t, int d) {
  return Simplex(std::span<const Vertex>(t.data(), static_cast<std::size_t>(d)));
}

// `cofacets(ridge)` returns the d-simplices containing `ridge`. Nodes at
// depth `max_depth` are not expanded. Returns nullopt as soon as some
// d-simplex fails to bring a fresh vertex.
template <typename Cofacets>
std::optional<RootedTree> build_tree(int d, const Simplex& root, int max_depth, Cofacets&& cofacets) {
  RootedTree t;
  t.d = d;
  RootedTree::Node rn;
  std::copy(root.begin(), root.end(), rn.tuple.begin());
  t.nodes.push_back(rn);
  std::unordered_set<Vertex> seen(root.begin(), root.end());
  std::vector<Simplex> parent_top{Simplex{}};
  std::vector<Simplex> cof;
  for (std::size_t idx = 0; idx < t.nodes.size(); ++idx) {
    if (t.nodes[idx].depth >= max_depth) continue;
    const Simplex ridge = tuple_simplex(t.nodes[idx].tuple, d);
    cof.clear();
    cofacets(ridge, cof);
    std::sort(cof.begin(), cof.end());
    for (const auto& top : cof) {
      if (!parent_top[idx].empty() && top == parent_top[idx]) continue;
      Vertex w = 0;
      for (Vertex v : top)
        if (!ridge.contains(v)) w = v;
      if (!seen.insert(w).second) return std::nullopt;
      RootedTree::Cofacet c;
      c.w = w;
      for (int i = 0; i < d; ++i) {
        RootedTree::Node child;
        child.tuple = t.nodes[idx].tuple;
        child.tuple[static_cast<std::size_t>(i)] = w;
        child.depth = t.nodes[idx].depth + 1;
        c.child[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(t.nodes.size());
        t.nodes.push_back(child);
        parent_top.push_back(top);
      }
      t.nodes[idx].cofacets.push_back(c);
    }
  }
  return t;
}

}  // namespace detail

/// The tree structure of a rooted complex, or nullopt if it is not a tree
/// (some d-simplex closes a cycle, or the complex has simplices outside the
/// closure of the root's tree component).
inline std::optional<RootedTree> as_tree(const RootedNeighborhood& a) {
  const int d = a.d();
  CofacetIndex index(a.complex);
  auto t = detail::build_tree(d, a.root, std::numeric_limits<int>::max(),
                              [&](const Simplex& ridge, std::vector<Simplex>& out) {
                                for (auto id : index.cofacets(*a.complex.ridge_id(ridge)))
                                  out.push_back(a.complex.tops().at(id));
                              });
  if (!t) return t;
  const std::uint64_t tops = t->top_count();
  for (int k = 0; k <= d; ++k) {
    const std::uint64_t want = binomial(static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(k) + 1) +
                               tops * binomial(static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(k));
    if (a.complex.count(k) != want) return std::nullopt;
  }
  return t;
}

/// Tree of B_X(root; r) read directly from X without materializing the ball.
inline std::optional<RootedTree> ball_tree(const ComplexD& x, const CofacetIndex& index, const Simplex& root, int r) {
  return detail::build_tree(x.d(), root, r, [&](const Simplex& ridge, std::vector<Simplex>& out) {
    auto id = x.ridge_id(ridge);
    if (!id) return;
    for (auto t : index.cofacets(*id)) out.push_back(x.tops().at(t));
  });
}

namespace detail {

inline std::string encode_tree_node(const RootedTree& t, std::uint32_t idx, const std::vector<int>& perm) {
  const auto& node = t.nodes[idx];
  std::vector<std::string> parts;
  parts.reserve(node.cofacets.size());
  for (const auto& c : node.cofacets) {
    std::string s = "[";
    for (int i = 0; i < t.d; ++i) s += encode_tree_node(t, c.child[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])], perm);
    s += "]";
    parts.push_back(std::move(s));
  }
  std::sort(parts.begin(), parts.end());
  std::string out = "(";
  for (auto& p : parts) out += p;
  out += ")";
  return out;
}

// log of the number of automorphisms that fix each position of the node's tuple.
inline double log_fixed_automorphisms(const RootedTree& t, std::uint32_t idx) {
  const auto& node = t.nodes[idx];
  std::vector<int> id(static_cast<std::size_t>(t.d));
  std::iota(id.begin(), id.end(), 0);
  std::map<std::string, int> groups;
  double acc = 0;
  for (const auto& c : node.cofacets) {
    std::string s;
    for (int i = 0; i < t.d; ++i) {
      const auto ch = c.child[static_cast<std::size_t>(i)];
      s += encode_tree_node(t, ch, id);
      acc += log_fixed_automorphisms(t, ch);
    }
    ++groups[s];
  }
  for (const auto& [code, m] : groups) acc += std::lgamma(m + 1.0);
  return acc;
}

inline std::vector<std::vector<int>> all_permutations(int d) {
  std::vector<int> p(static_cast<std::size_t>(d));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace detail

/// Canonical string of a rooted tree: the minimum recursive encoding over
/// all orderings of the root's vertices.
inline std::string tree_code(const RootedTree& t) {
  std::string best;
  bool first = true;
  for (const auto& perm : detail::all_permutations(t.d)) {
    auto s = detail::encode_tree_node(t, 0, perm);
    if (first || s < best) {
      best = std::move(s);
      first = false;
    }
  }
  std::string out = "T";
  out.push_back(static_cast<char>(t.d));
  return out + best;
}

/// log |Aut(T)| for root-preserving vertex automorphisms.
inline double log_automorphisms(const RootedTree& t) {
  std::vector<int> id(static_cast<std::size_t>(t.d));
  std::iota(id.begin(), id.end(), 0);
  const auto base = detail::encode_tree_node(t, 0, id);
  int stabilizing = 0;
  for (const auto& perm : detail::all_permutations(t.d))
    if (detail::encode_tree_node(t, 0, perm) == base) ++stabilizing;
  return std::log(static_cast<double>(stabilizing)) + detail::log_fixed_automorphisms(t, 0);
}

// ---------------------------------------------------------------------------
// General rooted complexes: individualization-refinement canonical form

namespace detail {

struct LocalComplex {
  int d = 0;
  std::uint32_t m = 0;                                  // vertex count
  std::vector<std::vector<std::vector<std::uint32_t>>> simp;  // simp[k] = k-simplices (k >= 1)
  std::vector<std::uint32_t> root;
  std::vector<std::vector<std::pair<int, std::uint32_t>>> incident;  // vertex -> (k, index)
  std::vector<std::uint64_t> initial;                   // invariant vertex colors
};

inline LocalComplex localize(const RootedNeighborhood& a) {
  LocalComplex lc;
  lc.d = a.d();
  std::vector<Vertex> verts;
  a.complex.skeleton(0).for_each([&](std::uint64_t, const Simplex& s) { verts.push_back(s[0]); });
  lc.m = static_cast<std::uint32_t>(verts.size());
  auto local = [&](Vertex v) {
    return static_cast<std::uint32_t>(std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
  };
  lc.simp.resize(static_cast<std::size_t>(lc.d) + 1);
  lc.incident.resize(lc.m);
  for (int k = 1; k <= lc.d; ++k)
    a.complex.skeleton(k).for_each([&](std::uint64_t, const Simplex& s) {
      std::vector<std::uint32_t> t;
      for (Vertex v : s) t.push_back(local(v));
      for (auto u : t) lc.incident[u].emplace_back(k, static_cast<std::uint32_t>(lc.simp[static_cast<std::size_t>(k)].size()));
      lc.simp[static_cast<std::size_t>(k)].push_back(std::move(t));
    });
  for (Vertex v : a.root) lc.root.push_back(local(v));

  // Ridge layers from the root over d-adjacency.
  CofacetIndex index(a.complex);
  auto dist = ridge_layers(a.complex, *a.complex.ridge_id(a.root), kUnreached - 1,
                           [&](std::uint64_t f) { return index.cofacets(f); }, nullptr);
  std::vector<std::uint64_t> vlayer(lc.m, static_cast<std::uint64_t>(kUnreached));
  for (const auto& [f, df] : dist)
    for (Vertex v : a.complex.ridges().at(f)) vlayer[local(v)] = std::min<std::uint64_t>(vlayer[local(v)], static_cast<std::uint64_t>(df));

  // Initial color: (in root, layer, degree per dimension), ranked.
  std::vector<std::vector<std::uint64_t>> sig(lc.m);
  for (std::uint32_t v = 0; v < lc.m; ++v) {
    const bool in_root = std::find(lc.root.begin(), lc.root.end(), v) != lc.root.end();
    sig[v].push_back(in_root ? 0 : 1);
    sig[v].push_back(vlayer[v]);
    std::vector<std::uint64_t> deg(static_cast<std::size_t>(lc.d) + 1, 0);
    for (auto [k, i] : lc.incident[v]) ++deg[static_cast<std::size_t>(k)];
    sig[v].insert(sig[v].end(), deg.begin(), deg.end());
  }
  auto sorted = sig;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  lc.initial.resize(lc.m);
  for (std::uint32_t v = 0; v < lc.m; ++v)
    lc.initial[v] = static_cast<std::uint64_t>(std::lower_bound(sorted.begin(), sorted.end(), sig[v]) - sorted.begin());
  return lc;
}

inline std::size_t distinct(const std::vector<std::uint64_t>& c) {
  auto s = c;
  std::sort(s.begin(), s.end());
  return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

// Color refinement to a stable partition; colors stay ordered by signature.
inline void refine(const LocalComplex& lc, std::vector<std::uint64_t>& color) {
  std::size_t classes = distinct(color);
  while (true) {
    std::vector<std::vector<std::uint64_t>> sig(lc.m);
    for (std::uint32_t v = 0; v < lc.m; ++v) {
      std::vector<std::vector<std::uint64_t>> parts;
      for (auto [k, i] : lc.incident[v]) {
        std::vector<std::uint64_t> p{static_cast<std::uint64_t>(k)};
        std::vector<std::uint64_t> others;
        for (auto u : lc.simp[static_cast<std::size_t>(k)][i])
          if (u != v) others.push_back(color[u]);
        std::sort(others.begin(), others.end());
        p.insert(p.end(), others.begin(), others.end());
        parts.push_back(std::move(p));
      }
      std::sort(parts.begin(), parts.end());
      sig[v].push_back(color[v]);
      for (auto& p : parts) {
        sig[v].push_back(p.size());
        sig[v].insert(sig[v].end(), p.begin(), p.end());
      }
    }
    auto sorted = sig;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (std::uint32_t v = 0; v < lc.m; ++v)
      color[v] = static_cast<std::uint64_t>(std::lower_bound(sorted.begin(), sorted.end(), sig[v]) - sorted.begin());
    const std::size_t now = sorted.size();
    if (now == classes) return;
    classes = now;
  }
}

inline std::vector<std::uint32_t> encode_labeling(const LocalComplex& lc, const std::vector<std::uint64_t>& color) {
  std::vector<std::uint32_t> enc{static_cast<std::uint32_t>(lc.d), lc.m};
  auto relabel = [&](const std::vector<std::uint32_t>& s) {
    std::vector<std::uint32_t> t;
    for (auto u : s) t.push_back(static_cast<std::uint32_t>(color[u]));
    std::sort(t.begin(), t.end());
    return t;
  };
  auto r = relabel(lc.root);
  enc.insert(enc.end(), r.begin(), r.end());
  for (int k = 1; k <= lc.d; ++k) {
    std::vector<std::vector<std::uint32_t>> all;
    for (const auto& s : lc.simp[static_cast<std::size_t>(k)]) all.push_back(relabel(s));
    std::sort(all.begin(), all.end());
    enc.push_back(static_cast<std::uint32_t>(all.size()));
    for (auto& s : all) enc.insert(enc.end(), s.begin(), s.end());
  }
  return enc;
}

inline void search_canonical(const LocalComplex& lc, std::vector<std::uint64_t> color,
                             std::optional<std::vector<std::uint32_t>>& best) {
  refine(lc, color);
  // First non-singleton cell by color value.
  std::map<std::uint64_t, std::vector<std::uint32_t>> cells;
  for (std::uint32_t v = 0; v < lc.m; ++v) cells[color[v]].push_back(v);
  const std::vector<std::uint32_t>* target = nullptr;
  std::uint64_t target_color = 0;
  for (const auto& [c, vs] : cells)
    if (vs.size() > 1) {
      target = &vs;
      target_color = c;
      break;
    }
  if (!target) {
    auto enc = encode_labeling(lc, color);
    if (!best || enc < *best) best = std::move(enc);
    return;
  }
  for (auto v : *target) {
    std::vector<std::uint64_t> next(lc.m);
    for (std::uint32_t u = 0; u < lc.m; ++u)
      next[u] = 2 * color[u] + ((color[u] == target_color && u != v) ? 1 : 0);
    search_canonical(lc, std::move(next), best);
  }
}

}  // namespace detail

inline std::string general_code(const RootedNeighborhood& a) {
  auto lc = detail::localize(a);
  std::optional<std::vector<std::uint32_t>> best;
  detail::search_canonical(lc, lc.initial, best);
  std::string out = "G";
  out.push_back(static_cast<char>(a.d()));
  for (auto x : *best)
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((x >> (8 * b)) & 0xff));
  return out;
}

/// Opaque byte string, equal for two rooted complexes iff they are isomorphic.
inline std::string canonical_code(const RootedNeighborhood& a) {
  if (auto t = as_tree(a)) return tree_code(*t);
  return general_code(a);
}

/// Canonical code of B_X(root; r) computed from X, materializing the ball
/// only when it is not a tree.
inline std::string ball_code(const ComplexD& x, const CofacetIndex& index, const Simplex& root, int r) {
  if (auto t = ball_tree(x, index, root, r)) return tree_code(*t);
  return general_code(neighborhood(x, index, root, r));
}

inline std::string to_hex(const std::string& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Direct isomorphism test (independent of canonical_code)

/// True iff a vertex bijection maps every simplex of A onto a simplex of B
/// and the root of A onto the root of B. Plain backtracking with degree
/// pruning; intended for small complexes.
inline bool rooted_isomorphic(const RootedNeighborhood& a, const RootedNeighborhood& b) {
  if (a.d() != b.d()) return false;
  const int d = a.d();
  for (int k = 0; k <= d; ++k)
    if (a.complex.count(k) != b.complex.count(k)) return false;

  struct Side {
    std::vector<Vertex> verts;
    std::vector<std::vector<Simplex>> inc;  // vertex -> simplices (dim >= 1) containing it
    std::vector<std::vector<std::uint64_t>> deg;
    std::vector<char> in_root;
    std::unordered_set<Simplex> all;
  };
  auto build = [&](const RootedNeighborhood& r) {
    Side s;
    r.complex.skeleton(0).for_each([&](std::uint64_t, const Simplex& v) { s.verts.push_back(v[0]); });
    s.inc.resize(s.verts.size());
    s.deg.assign(s.verts.size(), std::vector<std::uint64_t>(static_cast<std::size_t>(d) + 1, 0));
    s.in_root.assign(s.verts.size(), 0);
    auto li = [&](Vertex v) { return static_cast<std::size_t>(std::lower_bound(s.verts.begin(), s.verts.end(), v) - s.verts.begin()); };
    for (int k = 0; k <= d; ++k)
      r.complex.skeleton(k).for_each([&](std::uint64_t, const Simplex& x) {
        s.all.insert(x);
        if (k == 0) return;
        for (Vertex v : x) {
          s.inc[li(v)].push_back(x);
          ++s.deg[li(v)][static_cast<std::size_t>(k)];
        }
      });
    for (Vertex v : r.root) s.in_root[li(v)] = 1;
    return s;
  };
  const Side sa = build(a), sb = build(b);
  const std::size_t m = sa.verts.size();

  // Visit A's vertices root first, then in BFS order over the 1-skeleton.
  std::vector<std::size_t> order;
  std::vector<char> placed(m, 0);
  auto li_a = [&](Vertex v) { return static_cast<std::size_t>(std::lower_bound(sa.verts.begin(), sa.verts.end(), v) - sa.verts.begin()); };
  std::deque<std::size_t> q;
  for (Vertex v : a.root) {
    q.push_back(li_a(v));
    placed[li_a(v)] = 1;
  }
  auto drain = [&] {
    while (!q.empty()) {
      auto u = q.front();
      q.pop_front();
      order.push_back(u);
      for (const auto& s : sa.inc[u])
        for (Vertex v : s)
          if (!placed[li_a(v)]) {
            placed[li_a(v)] = 1;
            q.push_back(li_a(v));
          }
    }
  };
  drain();
  for (std::size_t u = 0; u < m; ++u)
    if (!placed[u]) {
      placed[u] = 1;
      q.push_back(u);
      drain();
    }

  std::vector<std::int64_t> fwd(m, -1), bwd(m, -1);
  std::unordered_map<Vertex, std::size_t> idx_b;
  for (std::size_t i = 0; i < m; ++i) idx_b[sb.verts[i]] = i;

  auto consistent = [&](std::size_t u, std::size_t v) {
    // Every simplex of A at u whose vertices are all mapped must map into B, and conversely.
    for (const auto& s : sa.inc[u]) {
      std::array<Vertex, kMaxVertices> img{};
      bool full = true;
      for (std::size_t i = 0; i < s.size() && full; ++i) {
        auto j = fwd[static_cast<std::size_t>(std::lower_bound(sa.verts.begin(), sa.verts.end(), s[i]) - sa.verts.begin())];
        if (j < 0) full = false;
        else img[i] = sb.verts[static_cast<std::size_t>(j)];
      }
      if (full && !sb.all.count(Simplex(std::span<const Vertex>(img.data(), s.size())))) return false;
    }
    for (const auto& s : sb.inc[v]) {
      std::array<Vertex, kMaxVertices> img{};
      bool full = true;
      for (std::size_t i = 0; i < s.size() && full; ++i) {
        auto j = bwd[idx_b.at(s[i])];
        if (j < 0) full = false;
        else img[i] = sa.verts[static_cast<std::size_t>(j)];
      }
      if (full && !sa.all.count(Simplex(std::span<const Vertex>(img.data(), s.size())))) return false;
    }
    return true;
  };

  std::function<bool(std::size_t)> extend = [&](std::size_t pos) -> bool {
    if (pos == m) return true;
    const auto u = order[pos];
    for (std::size_t v = 0; v < m; ++v) {
      if (bwd[v] >= 0 || sb.in_root[v] != sa.in_root[u] || sb.deg[v] != sa.deg[u]) continue;
      fwd[u] = static_cast<std::int64_t>(v);
      bwd[v] = static_cast<std::int64_t>(u);
      if (consistent(u, v) && extend(pos + 1)) return true;
      fwd[u] = -1;
      bwd[v] = -1;
    }
    return false;
  };
  return extend(0);
}

/// 1/(1+R*), R* the largest R <= r_cap at which the radius-R truncations are
/// isomorphic. Agreement through r_cap yields 1/(1+r_cap).
inline double rooted_distance(const RootedNeighborhood& a, const RootedNeighborhood& b, int r_cap) {
  if (r_cap < 0) throw domain_error("r_cap must be non-negative");
  if (a.d() != b.d()) throw dimension_error("rooted complexes of different dimension");
  for (int r = 1; r <= r_cap; ++r)
    if (canonical_code(truncate(a, r)) != canonical_code(truncate(b, r))) return 1.0 / r;
  return 1.0 / (1.0 + r_cap);
}

}  // namespace rsc
