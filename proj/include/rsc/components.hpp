#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <unordered_map>
#include <vector>

#include "rsc/complex.hpp"
#include "rsc/errors.hpp"

namespace rsc {

/// Disjoint sets over dense ids with path halving. Linking keeps the smaller
/// root, so every root is the smallest member of its set.
///
/// Roots store their negated size in the parent slot, so memory is one
/// 32-bit word per element.
class UnionFind {
 public:
  explicit UnionFind(std::uint64_t n) {
    if (n > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max()))
      throw resource_error("union-find over " + std::to_string(n) + " elements exceeds the 2^31 limit");
    parent_.assign(n, -1);
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] >= 0) {
      const auto p = static_cast<std::uint32_t>(parent_[x]);
      if (parent_[p] >= 0) parent_[x] = parent_[p];
      x = static_cast<std::uint32_t>(parent_[x]);
    }
    return x;
  }

  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent_[a] += parent_[b];
    parent_[b] = static_cast<std::int32_t>(a);
    return true;
  }

  std::uint64_t size_of_root(std::uint32_t r) const { return static_cast<std::uint64_t>(-parent_[r]); }
  bool is_singleton(std::uint32_t x) const { return parent_[x] == -1; }
  bool is_root(std::uint32_t x) const { return parent_[x] < 0; }
  void prefetch(std::uint32_t x) const { __builtin_prefetch(parent_.data() + x); }
  std::uint64_t size() const { return parent_.size(); }

 private:
  std::vector<std::int32_t> parent_;
};

struct Component {
  std::uint64_t size = 0;        // s_{d-1}
  std::uint64_t vertices = 0;    // s_0; 0 when not computed
  std::uint64_t min_member = 0;  // smallest member ridge id
  std::vector<std::uint64_t> members;
};

struct ComponentOptions {
  bool labels = true;
  bool members = false;
  std::size_t member_cap = std::size_t{1} << 20;
  // Number of leading components whose s_0 is computed.
  std::size_t s0_top = std::numeric_limits<std::size_t>::max();
};

/// d-dimensional connected components of the (d-1)-simplices of a complex.
///
/// Components with at least two ridges are listed in `components`, sorted by
/// size (descending) then by smallest member id. Singleton components are
/// only counted; in the full order they follow the listed ones by id.
struct ComponentReport {
  int d = 0;
  std::uint64_t total = 0;
  std::vector<Component> components;
  std::uint64_t singletons = 0;
  std::vector<std::uint64_t> labels;  // ridge id -> index in the full order (optional)

  std::uint64_t n_components() const { return components.size() + singletons; }

  // Size of the i-th largest component, 0 if there are fewer.
  std::uint64_t size_at(std::uint64_t i) const {
    if (i < components.size()) return components[i].size;
    return i < n_components() ? 1 : 0;
  }

  std::uint64_t vertices_at(std::uint64_t i) const {
    if (i < components.size()) return components[i].vertices;
    return i < n_components() ? static_cast<std::uint64_t>(d) : 0;
  }

  std::uint64_t s_cmax() const { return size_at(0); }
  std::uint64_t s_c2() const { return size_at(1); }
  std::uint64_t s0_cmax() const { return vertices_at(0); }
  std::uint64_t s0_c2() const { return vertices_at(1); }

  std::vector<std::uint64_t> sizes() const {
    std::vector<std::uint64_t> out;
    out.reserve(n_components());
    for (const auto& c : components) out.push_back(c.size);
    out.insert(out.end(), singletons, 1);
    return out;
  }

  std::uint64_t label_of(std::uint64_t ridge) const {
    if (labels.empty()) throw error("component report was built without labels");
    return labels.at(ridge);
  }
};

namespace detail {

// `comps` must be in ascending min_member order; the result is sorted by
// size (descending), ties keeping that order.
inline void order_and_label(ComponentReport& rep, std::vector<Component>& comps,
                            std::vector<std::uint32_t>& order) {
  // Sizes are below 2^31, so (complemented size, index) packs into one key.
  std::vector<std::uint64_t> keys(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i)
    keys[i] = ((std::uint64_t{0xffffffff} - comps[i].size) << 32) | static_cast<std::uint64_t>(i);
  std::sort(keys.begin(), keys.end());
  order.resize(comps.size());
  for (std::size_t i = 0; i < keys.size(); ++i) order[i] = static_cast<std::uint32_t>(keys[i] & 0xffffffff);
  rep.components.clear();
  rep.components.reserve(comps.size());
  for (auto i : order) rep.components.push_back(std::move(comps[i]));
}

}  // namespace detail

/// Union-find component analysis: every d-simplex unites its d+1 facets.
inline ComponentReport component_map(const ComplexD& x, const ComponentOptions& opt = {}) {
  ComponentReport rep;
  rep.d = x.d();
  if (x.d() < 1) throw dimension_error("component analysis needs top dimension >= 1");
  const auto& ridges = x.ridges();
  rep.total = ridges.size();
  UnionFind uf(rep.total);
  const std::size_t nf = static_cast<std::size_t>(x.d()) + 1;
  // Face ids are gathered in batches and their slots prefetched before the
  // unions; the parent array is far larger than cache.
  constexpr std::size_t kBatch = 64;
  std::vector<std::uint32_t> fid;
  fid.reserve(kBatch * nf);
  auto flush = [&] {
    for (auto f : fid) uf.prefetch(f);
    for (std::size_t b = 0; b < fid.size(); b += nf)
      for (std::size_t i = 1; i < nf; ++i) uf.unite(fid[b], fid[b + i]);
    fid.clear();
  };
  x.tops().for_each([&](std::uint64_t, const Simplex& t) {
    for (std::size_t i = 0; i < nf; ++i) fid.push_back(static_cast<std::uint32_t>(*ridges.index_of(t.without_index(i))));
    if (fid.size() == kBatch * nf) flush();
  });
  flush();

  // Every ridge of a d-simplex lies in a component of size >= d+1 >= 2, and
  // every other ridge is a singleton. Roots are minimal members, so one
  // ascending scan lists the components with their smallest ids.
  std::vector<std::uint32_t> roots;  // ascending
  std::vector<Component> comps;
  for (std::uint64_t id = 0; id < rep.total; ++id) {
    const auto i32 = static_cast<std::uint32_t>(id);
    if (!uf.is_root(i32) || uf.is_singleton(i32)) continue;
    roots.push_back(i32);
    comps.push_back(Component{uf.size_of_root(i32), 0, id, {}});
  }
  std::uint64_t listed = 0;
  for (const auto& c : comps) listed += c.size;
  rep.singletons = rep.total - listed;

  std::vector<std::uint32_t> order;
  detail::order_and_label(rep, comps, order);
  // rank[old index] = position in sorted order
  std::vector<std::uint32_t> rank(order.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  auto label_of_root = [&](std::uint32_t r) -> std::uint32_t {
    return rank[static_cast<std::size_t>(std::lower_bound(roots.begin(), roots.end(), r) - roots.begin())];
  };

  const std::size_t s0_top = std::min(opt.s0_top, rep.components.size());
  if (s0_top > 0) {
    // Roots of the leading components, for a cheap membership test when few are asked for.
    std::vector<std::uint32_t> top_roots;
    if (s0_top <= 16)
      for (std::size_t k = 0; k < s0_top; ++k)
        top_roots.push_back(uf.find(static_cast<std::uint32_t>(rep.components[k].min_member)));
    std::vector<std::pair<std::uint32_t, Vertex>> pairs;
    x.tops().for_each([&](std::uint64_t, const Simplex& t) {
      const auto r = uf.find(static_cast<std::uint32_t>(*ridges.index_of(t.without_index(0))));
      std::uint32_t idx;
      if (!top_roots.empty()) {
        const auto it = std::find(top_roots.begin(), top_roots.end(), r);
        if (it == top_roots.end()) return;
        idx = static_cast<std::uint32_t>(it - top_roots.begin());
      } else {
        idx = label_of_root(r);
      }
      if (idx < s0_top)
        for (Vertex v : t) pairs.emplace_back(idx, v);
    });
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    for (const auto& p : pairs) ++rep.components[p.first].vertices;
  }

  if (opt.labels || opt.members) {
    const std::uint64_t nlisted = rep.components.size();
    if (opt.labels) rep.labels.resize(rep.total);
    std::uint64_t singles_seen = 0;
    for (std::uint64_t id = 0; id < rep.total; ++id) {
      const auto i32 = static_cast<std::uint32_t>(id);
      std::uint64_t label;
      if (uf.is_singleton(i32)) {
        label = nlisted + singles_seen++;
      } else {
        label = label_of_root(uf.find(i32));
        if (opt.members) {
          auto& m = rep.components[label].members;
          if (m.size() < opt.member_cap) m.push_back(id);
        }
      }
      if (opt.labels) rep.labels[id] = label;
    }
  }
  return rep;
}

/// Independent oracle: BFS over the explicit ridge adjacency graph.
inline ComponentReport brute_force_components(const ComplexD& x, std::uint64_t cap = 10000) {
  if (x.d() < 1) throw dimension_error("component analysis needs top dimension >= 1");
  const auto& ridges = x.ridges();
  const std::uint64_t s = ridges.size();
  if (s > cap)
    throw resource_error("brute-force components limited to " + std::to_string(cap) + " ridges, got " +
                         std::to_string(s));
  std::vector<Simplex> ridge_list;
  ridges.for_each([&](std::uint64_t, const Simplex& r) { ridge_list.push_back(r); });
  std::vector<std::vector<std::uint64_t>> adj(s);
  x.tops().for_each([&](std::uint64_t, const Simplex& t) {
    std::vector<std::uint64_t> f;
    for (const auto& face : faces(t, x.d() - 1)) {
      auto it = std::lower_bound(ridge_list.begin(), ridge_list.end(), face);
      f.push_back(static_cast<std::uint64_t>(it - ridge_list.begin()));
    }
    for (auto a : f)
      for (auto b : f)
        if (a != b) adj[a].push_back(b);
  });

  std::vector<std::int64_t> comp(s, -1);
  std::vector<Component> comps;
  for (std::uint64_t start = 0; start < s; ++start) {
    if (comp[start] >= 0) continue;
    const auto c = static_cast<std::int64_t>(comps.size());
    Component info{0, 0, start, {}};
    std::deque<std::uint64_t> q{start};
    comp[start] = c;
    std::vector<Vertex> verts;
    while (!q.empty()) {
      auto u = q.front();
      q.pop_front();
      ++info.size;
      info.members.push_back(u);
      for (Vertex v : ridge_list[u]) verts.push_back(v);
      for (auto w : adj[u])
        if (comp[w] < 0) {
          comp[w] = c;
          q.push_back(w);
        }
    }
    std::sort(verts.begin(), verts.end());
    info.vertices = static_cast<std::uint64_t>(std::unique(verts.begin(), verts.end()) - verts.begin());
    std::sort(info.members.begin(), info.members.end());
    comps.push_back(std::move(info));
  }

  ComponentReport rep;
  rep.d = x.d();
  rep.total = s;
  // Keep the same convention as component_map: singletons are only counted.
  std::vector<Component> multi;
  std::vector<std::int64_t> remap(comps.size(), -1);
  for (std::size_t i = 0; i < comps.size(); ++i)
    if (comps[i].size >= 2) {
      remap[i] = static_cast<std::int64_t>(multi.size());
      multi.push_back(comps[i]);
    } else {
      ++rep.singletons;
    }
  std::vector<std::uint32_t> order;
  detail::order_and_label(rep, multi, order);
  std::vector<std::uint64_t> rank(order.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  rep.labels.resize(s);
  std::uint64_t singles_seen = 0;
  for (std::uint64_t id = 0; id < s; ++id) {
    const auto c = static_cast<std::size_t>(comp[id]);
    rep.labels[id] = remap[c] >= 0 ? rank[static_cast<std::size_t>(remap[c])]
                                   : rep.components.size() + singles_seen++;
  }
  return rep;
}

/// Number of (d-1)-simplices lying in components with at least k of them.
inline std::uint64_t z_geq(const ComponentReport& rep, std::uint64_t k) {
  if (k < 1) throw domain_error("z_geq needs k >= 1");
  if (k == 1) return rep.total;
  std::uint64_t z = 0;
  for (const auto& c : rep.components) {
    if (c.size < k) break;
    z += c.size;
  }
  return z;
}

/// Component fractions normalized by the observed s_{d-1}(X) and by n.
struct NormalizedStats {
  double cmax_fraction = 0;     // s_{d-1}(C_max) / s_{d-1}(X)
  double c2_fraction = 0;       // s_{d-1}(C_(2)) / s_{d-1}(X)
  double cmax_vertex_fraction = 0;  // s_0(C_max) / n
  double c2_vertex_fraction = 0;    // s_0(C_(2)) / n
  double component_density = 0; // C_n / s_{d-1}(X)
  bool empty = false;           // s_{d-1}(X) == 0; all fractions are 0
};

inline NormalizedStats normalized_stats(const ComponentReport& rep, std::uint32_t n) {
  NormalizedStats st;
  if (rep.total == 0) {
    st.empty = true;
    return st;
  }
  const auto tot = static_cast<double>(rep.total);
  st.cmax_fraction = static_cast<double>(rep.s_cmax()) / tot;
  st.c2_fraction = static_cast<double>(rep.s_c2()) / tot;
  st.component_density = static_cast<double>(rep.n_components()) / tot;
  if (n > 0) {
    st.cmax_vertex_fraction = static_cast<double>(rep.s0_cmax()) / n;
    st.c2_vertex_fraction = static_cast<double>(rep.s0_c2()) / n;
  }
  return st;
}

inline NormalizedStats normalized_stats(const ComponentReport& rep, const ComplexD& x) {
  return normalized_stats(rep, x.n());
}

/// True iff both reports induce the same partition of the ridge ids.
inline bool same_partition(const ComponentReport& a, const ComponentReport& b) {
  if (a.total != b.total || a.labels.size() != a.total || b.labels.size() != b.total) return false;
  std::unordered_map<std::uint64_t, std::uint64_t> fwd, bwd;
  for (std::uint64_t i = 0; i < a.total; ++i) {
    auto [f, fn] = fwd.try_emplace(a.labels[i], b.labels[i]);
    auto [g, gn] = bwd.try_emplace(b.labels[i], a.labels[i]);
    if (f->second != b.labels[i] || g->second != a.labels[i]) return false;
  }
  return true;
}

}  // namespace rsc
