#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rsc/branching.hpp"
#include "rsc/complex.hpp"
#include "rsc/components.hpp"
#include "rsc/errors.hpp"
#include "rsc/generator.hpp"
#include "rsc/neighborhood.hpp"

namespace rsc {

struct StepRecord {
  std::uint64_t k = 0;
  Simplex explored;
  std::uint32_t F = 0, B = 0, H = 0;  // new (d-1)-simplices by class of the d-simplex that brought them
  std::uint32_t forward = 0, backward = 0, sibling = 0;  // new d-simplices by class
  std::uint64_t A = 0;  // active set size after the step
  std::uint64_t V = 0;  // vertices discovered so far
  int dist = 0;
  std::uint32_t max_vertex_degree = 0;  // max vertex-edge degree of the explored complex

  std::uint32_t E() const { return F + B + H; }
  std::uint32_t E_tilde() const { return F + B; }
};

struct ExplorationTrace {
  Simplex root;
  std::vector<StepRecord> steps;
  bool terminated = false;
  std::uint64_t size = 0;  // (d-1)-simplices discovered
  std::vector<std::uint64_t> explored_ids;  // ridge ids in exploration order
};

/// Breadth-first exploration of the root's component.
///
/// The active set is ordered by (distance from root, ridge id). Exploring
/// sigma looks at every d-simplex tau = sigma + w not yet in the explored
/// complex: forward if w is a new vertex, backward if no face of tau
/// through w is known yet, sibling otherwise. Faces of tau through w that
/// are not yet known become active.
inline ExplorationTrace explore(const ComplexD& x, const CofacetIndex& index, const Simplex& root,
                                std::uint64_t step_cap = UINT64_MAX) {
  const auto root_id = x.require_ridge(root);
  const auto& ridges = x.ridges();
  const auto& tops = x.tops();
  ExplorationTrace tr;
  tr.root = root;
  std::unordered_set<std::uint64_t> known{root_id};
  std::unordered_set<std::uint32_t> used_tops;
  std::unordered_set<Vertex> verts(root.begin(), root.end());
  std::unordered_set<std::uint64_t> edges;
  std::unordered_map<Vertex, std::uint32_t> vdeg;
  std::uint32_t max_deg = 0;
  auto add_edges = [&](const Simplex& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j)
        if (edges.insert((static_cast<std::uint64_t>(s[i]) << 32) | s[j]).second) {
          max_deg = std::max({max_deg, ++vdeg[s[i]], ++vdeg[s[j]]});
        }
  };
  add_edges(root);

  using Item = std::pair<int, std::uint64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> active;
  active.emplace(0, root_id);

  while (!active.empty()) {
    if (tr.steps.size() >= step_cap) break;
    const auto [dist, sid] = active.top();
    active.pop();
    const Simplex sigma = ridges.at(sid);
    StepRecord st;
    st.k = tr.steps.size() + 1;
    st.explored = sigma;
    st.dist = dist;
    tr.explored_ids.push_back(sid);
    for (auto t : index.cofacets(sid)) {
      if (used_tops.count(t)) continue;
      const Simplex tau = tops.at(t);
      Vertex w = 0;
      for (Vertex v : tau)
        if (!sigma.contains(v)) w = v;
      std::uint32_t fresh = 0;
      std::array<std::uint64_t, kMaxVertices> new_ids{};
      bool any_known = false;
      for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] == w) continue;
        const auto f = *ridges.index_of(tau.without_index(i));
        if (known.count(f)) any_known = true;
        else new_ids[fresh++] = f;
      }
      if (!verts.count(w)) {
        st.F += fresh;
        ++st.forward;
      } else if (!any_known) {
        st.B += fresh;
        ++st.backward;
      } else {
        st.H += fresh;
        ++st.sibling;
      }
      for (std::uint32_t i = 0; i < fresh; ++i) {
        known.insert(new_ids[i]);
        active.emplace(dist + 1, new_ids[i]);
      }
      used_tops.insert(t);
      verts.insert(w);
      add_edges(tau);
    }
    st.A = active.size();
    st.V = verts.size();
    st.max_vertex_degree = max_deg;
    tr.steps.push_back(st);
  }
  tr.terminated = active.empty();
  tr.size = known.size();
  return tr;
}

inline ExplorationTrace explore(const ComplexD& x, const Simplex& root, std::uint64_t step_cap = UINT64_MAX) {
  return explore(x, CofacetIndex(x), root, step_cap);
}

/// Number of l-simplices of X containing rho.
inline std::uint64_t degree(const ComplexD& x, const Simplex& rho, int l) {
  if (l < rho.dim() || l > x.d()) throw dimension_error("degree needs dim(rho) <= l <= d");
  if (!x.contains(rho)) throw membership_error(rho.str() + " not in complex");
  const auto& sk = x.skeleton(l);
  if (sk.is_complete())
    return binomial(sk.universe() - rho.size(), static_cast<std::uint64_t>(l) + 1 - rho.size());
  std::uint64_t c = 0;
  sk.for_each([&](std::uint64_t, const Simplex& s) {
    if (s.contains(rho)) ++c;
  });
  return c;
}

// ---------------------------------------------------------------------------
// Local neighborhood census

struct Census {
  int r = 0;
  std::uint64_t sampled = 0;
  bool empty = false;
  std::map<std::string, std::uint64_t> counts;
  std::map<std::string, RootedTree> trees;  // one representative per tree-shaped code

  double freq(const std::string& code) const {
    auto it = counts.find(code);
    return it == counts.end() || sampled == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(sampled);
  }
};

// `cap` distinct ids from [0, total), uniformly, ascending (Floyd's algorithm).
inline std::vector<std::uint64_t> sample_ids(std::uint64_t total, std::uint64_t cap, Rng& rng) {
  std::vector<std::uint64_t> out;
  if (cap >= total) {
    out.resize(total);
    for (std::uint64_t i = 0; i < total; ++i) out[i] = i;
    return out;
  }
  std::unordered_set<std::uint64_t> chosen;
  for (std::uint64_t j = total - cap; j < total; ++j) {
    const auto t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
    chosen.insert(chosen.count(t) ? j : t);
  }
  out.assign(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

/// Frequencies of radius-r ball isomorphism types over (d-1)-simplices,
/// from a uniform sample of `sample_cap` roots without replacement.
inline Census census(const ComplexD& x, const CofacetIndex& index, int r, std::uint64_t sample_cap,
                     const Seed& seed) {
  Census c;
  c.r = r;
  const auto total = x.ridges().size();
  if (total == 0) {
    c.empty = true;
    return c;
  }
  auto rng = seed.stream(kStreamCensus);
  for (auto id : sample_ids(total, sample_cap, rng)) {
    const Simplex root = x.ridges().at(id);
    std::string code;
    if (auto t = ball_tree(x, index, root, r)) {
      code = tree_code(*t);
      if (!c.trees.count(code)) c.trees.emplace(code, std::move(*t));
    } else {
      code = general_code(neighborhood(x, index, root, r));
    }
    ++c.counts[code];
    ++c.sampled;
  }
  return c;
}

inline Census census(const ComplexD& x, int r, std::uint64_t sample_cap, const Seed& seed) {
  return census(x, CofacetIndex(x), r, sample_cap, seed);
}

/// Total variation between a census and the Poisson-tree limit law at the
/// census radius. Shapes never observed contribute their whole limit mass,
/// which is 1 minus the mass of the observed tree shapes.
inline double census_tv(const Census& c, const BranchingParams& bp) {
  double acc = 0, seen_mass = 0;
  for (const auto& [code, n] : c.counts) {
    const double f = static_cast<double>(n) / static_cast<double>(c.sampled);
    auto it = c.trees.find(code);
    if (it == c.trees.end()) {
      acc += f;
      continue;
    }
    const double mu = tree_prob(it->second, c.r, bp);
    seen_mass += mu;
    acc += std::abs(f - mu);
  }
  return 0.5 * (acc + std::max(0.0, 1.0 - seen_mass));
}

// ---------------------------------------------------------------------------
// Trace statistics

struct StepSummary {
  std::uint64_t steps = 0;
  double mean_E = 0, se_E = 0;
  double mean_E_tilde = 0;
  double target = 0;  // d * lambda
  std::vector<std::uint64_t> hist;  // hist[e] = number of steps with E_k = e
  double max_cdf_excess = 0;  // max_x P(d Bin(n, lambda/n) <= x) - F_emp(x)
  double dkw_band = 0;        // 99% Dvoretzky-Kiefer-Wolfowitz band
  bool dominated = true;
};

/// Pools E_k over steps k <= fraction * n of the given traces.
inline StepSummary step_distribution_check(const std::vector<ExplorationTrace>& traces, const GenParams& gp,
                                           double fraction = 0.1) {
  StepSummary s;
  const double lambda = derive_params(gp).lambda;
  s.target = gp.d * lambda;
  const double limit = fraction * gp.n;
  double sum = 0, sum2 = 0, sum_t = 0;
  for (const auto& tr : traces)
    for (const auto& st : tr.steps) {
      if (static_cast<double>(st.k) > limit) break;
      const auto e = st.E();
      if (s.hist.size() <= e) s.hist.resize(e + 1, 0);
      ++s.hist[e];
      sum += e;
      sum2 += static_cast<double>(e) * e;
      sum_t += st.E_tilde();
      ++s.steps;
    }
  if (s.steps == 0) return s;
  const double m = static_cast<double>(s.steps);
  s.mean_E = sum / m;
  s.mean_E_tilde = sum_t / m;
  s.se_E = std::sqrt(std::max(0.0, sum2 / m - s.mean_E * s.mean_E) / m);

  // CDF of d * Bin(n, lambda/n) at x is P(Bin <= floor(x/d)).
  const double p = std::min(1.0, lambda / gp.n);
  double emp = 0;
  for (std::size_t x = 0; x < s.hist.size(); ++x) {
    emp += static_cast<double>(s.hist[x]) / m;
    const std::uint64_t j_max = x / static_cast<std::size_t>(gp.d);
    double bound = 0;
    for (std::uint64_t j = 0; j <= j_max && j <= gp.n; ++j)
      bound += std::exp(std::lgamma(gp.n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(gp.n - j + 1.0) +
                        (p > 0 ? j * std::log(p) : (j == 0 ? 0 : -INFINITY)) +
                        (p < 1 ? (gp.n - j) * std::log1p(-p) : (j == gp.n ? 0 : -INFINITY)));
    s.max_cdf_excess = std::max(s.max_cdf_excess, std::min(1.0, bound) - emp);
  }
  s.dkw_band = std::sqrt(std::log(2.0 / 0.01) / (2.0 * m));
  s.dominated = s.max_cdf_excess <= s.dkw_band;
  return s;
}

struct VertexCurvePoint {
  double t = 0;
  double v = 0;       // V_{floor(t n)} / n
  double theory = 0;  // 1 - exp(-lambda t)
};

struct VertexCurve {
  std::vector<VertexCurvePoint> points;
  bool truncated = false;
};

/// Vertex discovery along the exploration from `root`, at steps floor(t n).
inline VertexCurve vertex_growth_curve(const ComplexD& x, const CofacetIndex& index, const Simplex& root,
                                       const std::vector<double>& grid, double lambda) {
  VertexCurve out;
  double t_max = 0;
  for (double t : grid) t_max = std::max(t_max, t);
  const auto n = x.n();
  const auto cap = static_cast<std::uint64_t>(std::floor(t_max * n));
  const auto tr = explore(x, index, root, cap);
  for (double t : grid) {
    const auto k = static_cast<std::uint64_t>(std::floor(t * n));
    VertexCurvePoint p;
    p.t = t;
    p.theory = 1.0 - std::exp(-lambda * t);
    if (k == 0) {
      p.v = static_cast<double>(root.size()) / n;
    } else if (k <= tr.steps.size()) {
      p.v = static_cast<double>(tr.steps[k - 1].V) / n;
    } else {
      out.truncated = true;
      continue;
    }
    out.points.push_back(p);
  }
  return out;
}

struct ConnectivityEstimate {
  std::uint64_t trials = 0;
  std::uint64_t both_large = 0;
  std::uint64_t same_and_large = 0;
  double p_both() const { return trials ? static_cast<double>(both_large) / trials : 0.0; }
  double p_same() const { return trials ? static_cast<double>(same_and_large) / trials : 0.0; }
  // Conditional probability of sharing a component given both are large.
  double ratio() const { return both_large ? static_cast<double>(same_and_large) / both_large : 0.0; }
};

/// Uniform independent pairs of (d-1)-simplices; `rep` must carry labels.
inline ConnectivityEstimate two_source_connectivity(const ComplexD& x, const ComponentReport& rep, std::uint64_t k,
                                                    std::uint64_t trials, const Seed& seed) {
  const auto total = x.ridges().size();
  if (total < 2) throw domain_error("need at least two (d-1)-simplices");
  if (rep.labels.size() != total) throw error("component report lacks labels for this complex");
  auto rng = seed.stream(kStreamPairs);
  std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
  ConnectivityEstimate est;
  est.trials = trials;
  auto size_of = [&](std::uint64_t label) { return rep.size_at(label); };
  for (std::uint64_t i = 0; i < trials; ++i) {
    const auto a = rep.labels[pick(rng)];
    const auto b = rep.labels[pick(rng)];
    if (size_of(a) >= k && size_of(b) >= k) {
      ++est.both_large;
      if (a == b) ++est.same_and_large;
    }
  }
  return est;
}

}  // namespace rsc
