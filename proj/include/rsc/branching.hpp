#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "rsc/errors.hpp"
#include "rsc/generator.hpp"
#include "rsc/neighborhood.hpp"

namespace rsc {

/// Branching process where every individual has d * Poisson(lambda) children.
struct BranchingParams {
  double lambda = 0;
  int d = 2;

  double mean_offspring() const { return d * lambda; }
  bool supercritical() const { return d * lambda > 1.0; }
};

inline constexpr double kDefaultTol = 1e-13;

/// Smallest solution of gamma = exp(-lambda (1 - gamma^d)).
inline double extinction_gamma(const BranchingParams& bp, double tol = kDefaultTol) {
  if (tol <= 0) throw domain_error("tolerance must be positive");
  if (!bp.supercritical()) return 1.0;
  double g = 0.0;
  for (int it = 0; it < 100000000; ++it) {
    const double next = std::exp(-bp.lambda * (1.0 - std::pow(g, bp.d)));
    const double step = next - g;
    g = next;
    if (step < tol) break;
  }
  return g;
}

inline double survival_zeta(const BranchingParams& bp, double tol = kDefaultTol) {
  return 1.0 - extinction_gamma(bp, tol);
}

/// gamma - lambda d/(d+1) gamma^{d+1}, the limiting number of components per (d-1)-simplex.
inline double component_density(const BranchingParams& bp, double tol = kDefaultTol) {
  const double g = extinction_gamma(bp, tol);
  return g - bp.lambda * bp.d / (bp.d + 1.0) * std::pow(g, bp.d + 1);
}

inline double log_poisson(double mean, std::uint64_t k) {
  if (mean == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -mean + static_cast<double>(k) * std::log(mean) - std::lgamma(static_cast<double>(k) + 1.0);
}

/// P(total progeny = k) for k = 1..k_max, by the hitting-time formula
/// P(C = k) = P(d * Poisson(k lambda) = k - 1) / k.
inline std::vector<double> progeny_pmf(const BranchingParams& bp, std::uint64_t k_max) {
  if (k_max < 1) throw domain_error("k_max must be at least 1");
  std::vector<double> out(k_max, 0.0);
  const auto d = static_cast<std::uint64_t>(bp.d);
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    if ((k - 1) % d != 0) continue;
    const double lp = log_poisson(static_cast<double>(k) * bp.lambda, (k - 1) / d) - std::log(static_cast<double>(k));
    out[k - 1] = std::exp(lp);
  }
  return out;
}

/// Smallest fixed point of G = z exp(lambda (G^d - 1)).
inline double progeny_pgf(const BranchingParams& bp, double z, double tol = kDefaultTol) {
  if (!(z >= 0.0 && z <= 1.0)) throw domain_error("pgf argument must lie in [0,1]");
  if (z == 1.0) return extinction_gamma(bp, tol);
  double g = 0.0;
  for (int it = 0; it < 100000000; ++it) {
    const double next = z * std::exp(bp.lambda * (std::pow(g, bp.d) - 1.0));
    const double step = next - g;
    g = next;
    if (step < tol) break;
  }
  return g;
}

/// Poisson large-deviation rate lambda - 1 - log(lambda).
inline double rate_I(double lambda) {
  if (!(lambda > 0)) throw domain_error("rate function needs lambda > 0");
  return lambda - 1.0 - std::log(lambda);
}

struct SubcriticalConstants {
  double c = 0;  // lower bracket coefficient
  double C = 0;  // upper bracket coefficient
};

/// c = (1 - margin)/I_{lambda/2}, C = (1 + margin) d^2 / I_lambda.
inline SubcriticalConstants subcritical_constants(const BranchingParams& bp, double margin = 0.1) {
  if (!(bp.lambda > 0) || bp.d * bp.lambda >= 1.0)
    throw domain_error("subcritical constants need 0 < lambda < 1/d");
  return {(1.0 - margin) / rate_I(bp.lambda / 2.0), (1.0 + margin) * bp.d * bp.d / rate_I(bp.lambda)};
}

/// Smallest root of pgf(s) = s on [0,1], by iteration from 0.
inline double extinction_generic(const std::function<double(double)>& pgf, double tol = kDefaultTol,
                                 long max_iter = 100000000) {
  double s = 0.0;
  for (long it = 0; it < max_iter; ++it) {
    const double next = pgf(s);
    const double step = next - s;
    s = next;
    if (step < tol) break;
  }
  return s;
}

/// Same, for an offspring law given by its pmf (pmf[j] = P(j children)).
inline double extinction_generic(const std::vector<double>& pmf, double tol = kDefaultTol) {
  double mean = 0;
  for (std::size_t j = 0; j < pmf.size(); ++j) mean += static_cast<double>(j) * pmf[j];
  if (mean <= 1.0) return 1.0;
  return extinction_generic(
      [&](double s) {
        double acc = 0;
        for (std::size_t j = pmf.size(); j-- > 0;) acc = acc * s + pmf[j];
        return acc;
      },
      tol);
}

/// Poisson tree truncated at radius r: every frontier ridge gets Poisson(lambda)
/// new d-simplices. The root is {0,...,d-1}; each new d-simplex takes the next
/// unused vertex.
inline RootedNeighborhood sample_poisson_tree(const BranchingParams& bp, int r, const Seed& seed) {
  if (r < 0) throw domain_error("radius must be non-negative");
  auto rng = seed.stream(kStreamTree);
  std::poisson_distribution<int> pois(bp.lambda);
  std::vector<Vertex> rv(static_cast<std::size_t>(bp.d));
  for (int i = 0; i < bp.d; ++i) rv[static_cast<std::size_t>(i)] = static_cast<Vertex>(i);
  const Simplex root(rv);
  std::vector<Simplex> gens{root};
  std::vector<Simplex> frontier{root};
  Vertex next = static_cast<Vertex>(bp.d);
  bool died = false;
  for (int layer = 0; layer < r; ++layer) {
    std::vector<Simplex> grown;
    for (const auto& f : frontier) {
      const int x = bp.lambda > 0 ? pois(rng) : 0;
      for (int j = 0; j < x; ++j) {
        const Vertex w = next++;
        const Simplex top = f.with(w);
        gens.push_back(top);
        for (std::size_t i = 0; i < f.size(); ++i) grown.push_back(f.without_index(i).with(w));
      }
    }
    frontier = std::move(grown);
    if (frontier.empty()) {
      died = true;
      break;
    }
  }
  auto out = make_rooted(ComplexD::from_simplices(next, bp.d, gens), root);
  out.radius = r;
  out.saturated = died;
  return out;
}

/// Limit probability that the radius-r ball of a Poisson tree is isomorphic to T:
/// d!/|Aut(T)| * prod over ridges at depth < r of exp(-lambda) lambda^{x}.
inline double tree_prob(const RootedTree& t, int r, const BranchingParams& bp) {
  if (t.d != bp.d) throw dimension_error("tree dimension does not match branching parameters");
  if (t.depth() > r) throw shape_error("tree is deeper than the radius");
  double lp = std::lgamma(t.d + 1.0) - log_automorphisms(t);
  for (const auto& node : t.nodes) {
    if (node.depth >= r) continue;
    const auto x = node.cofacets.size();
    if (bp.lambda == 0.0) {
      if (x > 0) return 0.0;
      continue;
    }
    lp += -bp.lambda + static_cast<double>(x) * std::log(bp.lambda);
  }
  return std::exp(lp);
}

inline double tree_prob(const RootedNeighborhood& t, int r, const BranchingParams& bp) {
  auto tree = as_tree(t);
  if (!tree) throw shape_error("rooted complex is not a tree");
  return tree_prob(*tree, r, bp);
}

}  // namespace rsc
