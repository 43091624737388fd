#pragma once

#include <algorithm>
#include <vector>

#include "rsc/complex.hpp"
#include "rsc/generator.hpp"

namespace testing_helpers {

// Closure of the given simplices; n defaults to max vertex + 1.
inline rsc::ComplexD closure(int d, const std::vector<rsc::Simplex>& gens, std::uint32_t n = 0) {
  if (n == 0)
    for (const auto& g : gens) n = std::max<std::uint32_t>(n, g.back() + 1);
  return rsc::ComplexD::from_simplices(n, d, gens);
}

// Random subcomplex of the full d-complex on n vertices: each d-simplex kept
// with probability p, plus every (d-1)-simplex.
inline rsc::ComplexD random_lm(std::uint32_t n, int d, double p, std::uint64_t seed) {
  rsc::GenParams gp;
  gp.n = n;
  gp.d = d;
  gp.model = rsc::Model::lm;
  gp.p.assign(static_cast<std::size_t>(d), 1.0);
  gp.p.back() = p;
  return rsc::sample(gp, rsc::Seed{seed, 0});
}

// Relabels every vertex through perm and rebuilds.
inline rsc::ComplexD relabel(const rsc::ComplexD& x, const std::vector<rsc::Vertex>& perm) {
  std::vector<rsc::Simplex> gens;
  for (const auto& s : x.maximal_simplices()) {
    std::vector<rsc::Vertex> v;
    for (auto u : s) v.push_back(perm[u]);
    gens.emplace_back(v);
  }
  std::uint32_t n = x.n();
  for (auto v : perm) n = std::max<std::uint32_t>(n, v + 1);
  return rsc::ComplexD::from_simplices(n, x.d(), gens);
}

inline rsc::Simplex relabel(const rsc::Simplex& s, const std::vector<rsc::Vertex>& perm) {
  std::vector<rsc::Vertex> v;
  for (auto u : s) v.push_back(perm[u]);
  return rsc::Simplex(v);
}

}  // namespace testing_helpers
