#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rsc/complex.hpp"
#include "rsc/errors.hpp"
#include "rsc/simplex.hpp"

namespace rsc {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

/// Master seed plus trial index. Every random stream used by a trial is
/// derived from (master, trial, stream key), so trials are independent and
/// adding a stream never perturbs another.
struct Seed {
  std::uint64_t master = 0;
  std::uint64_t trial = 0;

  std::uint64_t trial_seed() const { return splitmix64(splitmix64(master) ^ splitmix64(trial + 0x51ed2701ull)); }
  std::uint64_t stream_seed(std::uint64_t key) const { return splitmix64(trial_seed() ^ splitmix64(key * 0x2545f4914f6cdd1dull + 1)); }
  Rng stream(std::uint64_t key) const { return Rng(stream_seed(key)); }
};

// Stream keys; dimension k of the generator uses key k.
inline constexpr std::uint64_t kStreamCensus = 1001;
inline constexpr std::uint64_t kStreamPairs = 1002;
inline constexpr std::uint64_t kStreamRoots = 1003;
inline constexpr std::uint64_t kStreamTree = 1004;

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Gaps between successes of a Bernoulli(p) stream, drawn as geometric
/// variables so sparse streams cost O(successes) random draws.
class GeometricSkipper {
 public:
  GeometricSkipper(double p, Rng& rng) : p_(p), rng_(&rng), log_q_(std::log1p(-p)) {}

  static constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

  // Number of failures before the next success.
  std::uint64_t gap() {
    if (p_ >= 1.0) return 0;
    if (p_ <= 0.0) return kNever;
    const double u = 1.0 - uniform01(*rng_);  // (0, 1]
    const double g = std::floor(std::log(u) / log_q_);
    if (!(g < 1.8e19)) return kNever;
    return static_cast<std::uint64_t>(g);
  }

 private:
  double p_;
  Rng* rng_;
  double log_q_;
};

enum class Model { mrsc, lm };

inline std::string to_string(Model m) { return m == Model::lm ? "lm" : "mrsc"; }

inline Model parse_model(const std::string& s) {
  if (s == "lm") return Model::lm;
  if (s == "mrsc") return Model::mrsc;
  throw config_error("unknown model '" + s + "' (expected lm or mrsc)");
}

/// Parameters of MRSC_d(n; p) or LM_d(n, p_d).
struct GenParams {
  std::uint32_t n = 0;
  int d = 2;
  std::vector<double> p;  // p[k-1] = p_k, k = 1..d
  Model model = Model::mrsc;
  std::optional<double> alpha1;
  std::optional<double> alpha2;
  // Shared-uniform mode: the top layer is drawn at this probability and
  // thinned to p_d, so complexes that differ only in p_d are nested.
  std::optional<double> coupling_ceiling;
  // Largest expected number of explicitly stored simplices.
  double budget = 6e7;

  double p_k(int k) const { return p.at(static_cast<std::size_t>(k - 1)); }

  void validate() const {
    if (d < 1 || static_cast<std::size_t>(d) + 1 > kMaxVertices)
      throw config_error("dimension d=" + std::to_string(d) + " unsupported");
    if (p.size() != static_cast<std::size_t>(d))
      throw config_error("expected " + std::to_string(d) + " probabilities, got " + std::to_string(p.size()));
    for (double x : p)
      if (!(x >= 0.0 && x <= 1.0)) throw config_error("probability " + std::to_string(x) + " outside [0,1]");
    if (model == Model::lm)
      for (int k = 1; k < d; ++k)
        if (p_k(k) != 1.0) throw config_error("lm model requires p_1 = ... = p_{d-1} = 1");
    if (alpha1 && alpha2 && std::abs(2 * *alpha1 + *alpha2 - 1.0) > 1e-9)
      throw config_error("alpha exponents must satisfy 2*alpha1 + alpha2 = 1");
    if (coupling_ceiling && (*coupling_ceiling < p.back() || *coupling_ceiling > 1.0))
      throw config_error("coupling ceiling must lie in [p_d, 1]");
  }
};

struct DerivedParams {
  double q = 0;       // probability a fixed (d-1)-simplex is present
  double r = 0;       // probability a fixed cofacet is present given its facet
  double lambda = 0;  // n * r
};

inline DerivedParams derive_params(const GenParams& gp) {
  DerivedParams out{1.0, 1.0, 0.0};
  for (int k = 1; k <= gp.d - 1; ++k) out.q *= std::pow(gp.p_k(k), binomial_real(gp.d, k + 1));
  for (int k = 1; k <= gp.d; ++k) out.r *= std::pow(gp.p_k(k), binomial_real(gp.d, k));
  out.lambda = gp.n * out.r;
  return out;
}

/// Upper end of the supercritical window for the d = 2 parameterization p_1 ~ n^{-alpha1}.
inline double supercritical_bound(double alpha1) {
  if (!(alpha1 >= 0.0 && alpha1 <= 0.5)) throw domain_error("alpha1 must lie in [0, 1/2]");
  if (alpha1 == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(2.0, 2.0 * (1.0 - alpha1) / alpha1);
}

/// E[s_k] for k = 0..d.
inline std::vector<double> expected_counts(const GenParams& gp) {
  std::vector<double> out;
  for (int k = 0; k <= gp.d; ++k) {
    double e = binomial_real(gp.n, k + 1);
    for (int j = 1; j <= k; ++j) e *= std::pow(gp.p_k(j), binomial_real(k + 1, j + 1));
    out.push_back(e);
  }
  return out;
}

/// LM_d(n, lambda/n).
inline GenParams lm_params(std::uint32_t n, int d, double lambda) {
  GenParams gp;
  gp.n = n;
  gp.d = d;
  gp.model = Model::lm;
  gp.p.assign(static_cast<std::size_t>(d), 1.0);
  gp.p.back() = lambda / n;
  gp.alpha1 = 0.0;
  gp.alpha2 = d == 2 ? std::optional<double>(1.0) : std::nullopt;
  gp.validate();
  return gp;
}

/// MRSC with the given p_1..p_{d-1}; p_d is set so that n * r_d = lambda exactly.
inline GenParams mrsc_lambda_params(std::uint32_t n, std::vector<double> lower, double lambda) {
  GenParams gp;
  gp.n = n;
  gp.d = static_cast<int>(lower.size()) + 1;
  gp.p = std::move(lower);
  double denom = n;
  for (int k = 1; k < gp.d; ++k) denom *= std::pow(gp.p_k(k), binomial_real(gp.d, k));
  const double pd = lambda / denom;
  if (!(pd <= 1.0)) throw config_error("lambda=" + std::to_string(lambda) + " needs p_d=" + std::to_string(pd) + " > 1");
  gp.p.push_back(pd);
  bool lower_full = true;
  for (int k = 1; k < gp.d; ++k) lower_full = lower_full && gp.p_k(k) == 1.0;
  gp.model = lower_full ? Model::lm : Model::mrsc;
  gp.validate();
  return gp;
}

/// d = 2 sweep cell with p_1 = n^{-alpha1}, alpha2 = 1 - 2 alpha1, n r_2 = lambda.
inline GenParams mrsc_alpha_params(std::uint32_t n, double alpha1, double lambda) {
  if (!(alpha1 >= 0.0 && alpha1 <= 0.5)) throw config_error("alpha1 must lie in [0, 1/2]");
  GenParams gp = mrsc_lambda_params(n, {std::pow(static_cast<double>(n), -alpha1)}, lambda);
  gp.alpha1 = alpha1;
  gp.alpha2 = 1.0 - 2.0 * alpha1;
  gp.validate();
  return gp;
}

namespace detail {

// Keeps a Bernoulli selection over a stream whose positions are visited in
// order; `take()` is called once per position.
class StreamSelector {
 public:
  StreamSelector(double p, Rng& rng, std::optional<double> ceiling)
      : target_(p), skip_(ceiling.value_or(p), rng), rng_(&rng), thin_(ceiling.has_value()), ceil_(ceiling.value_or(p)) {
    next_ = skip_.gap();
  }

  bool take() {
    if (next_ > 0) {
      if (next_ != GeometricSkipper::kNever) --next_;
      return false;
    }
    next_ = skip_.gap();
    if (!thin_) return true;
    return uniform01(*rng_) * ceil_ < target_;
  }

  // Positions left before the next success (kNever when there is none).
  std::uint64_t pending() const { return next_; }

  // Skips up to `len` positions without a success; returns the number skipped.
  std::uint64_t skip(std::uint64_t len) {
    if (next_ == GeometricSkipper::kNever) return len;
    const std::uint64_t s = std::min(len, next_);
    next_ -= s;
    return s;
  }

 private:
  double target_;
  GeometricSkipper skip_;
  Rng* rng_;
  bool thin_;
  double ceil_;
  std::uint64_t next_ = 0;
};

// k-simplices over a complete (k-1)-skeleton on [n]: every (k+1)-subset is a
// candidate, enumerated as blocks {tau + w : w > max(tau)} in lex order.
inline Skeleton sample_over_complete(std::uint32_t n, int k, StreamSelector& sel) {
  std::vector<Vertex> flat;
  const std::size_t m = static_cast<std::size_t>(k);  // |tau|
  if (m + 1 > n) return Skeleton::from_flat(n, k, {});
  std::array<Vertex, kMaxVertices> a{};
  for (std::size_t i = 0; i < m; ++i) a[i] = static_cast<Vertex>(i);
  while (true) {
    {
      // Jump over consecutive blocks (same prefix, growing a[m-1]) that lie
      // entirely inside the pending gap. Block b has n - 1 - b positions, so
      // j blocks from b hold S(j) = j L - j (j - 1) / 2 with L = n - 1 - b.
      const std::uint64_t b = a[m - 1];
      const std::uint64_t L = n - 1 - b;
      const std::uint64_t gap = sel.pending();
      const std::uint64_t jmax = n - 2 - b;
      if (gap >= L && jmax > 0) {
        auto S = [&](std::uint64_t j) { return j * L - j * (j - 1) / 2; };
        const double q = 2.0 * static_cast<double>(L) + 1.0;
        const double disc = q * q - 8.0 * static_cast<double>(gap);
        std::uint64_t j = disc < 0 ? jmax : std::min<std::uint64_t>(jmax, static_cast<std::uint64_t>((q - std::sqrt(disc)) / 2));
        while (j < jmax && S(j + 1) <= gap) ++j;
        while (j > 0 && S(j) > gap) --j;
        if (j > 0) {
          sel.skip(S(j));
          a[m - 1] = static_cast<Vertex>(b + j);
        }
      }
    }
    const Vertex lo = a[m - 1] + 1;
    std::uint64_t len = n - lo;
    Vertex w = lo;
    while (len > 0) {
      const std::uint64_t s = sel.skip(len);
      w += static_cast<Vertex>(s);
      len -= s;
      if (len == 0) break;
      if (sel.take()) {
        flat.insert(flat.end(), a.begin(), a.begin() + m);
        flat.push_back(w);
      }
      ++w;
      --len;
    }
    // next tau; tau ranges over m-subsets with max < n-1
    std::size_t i = m;
    while (i > 0 && a[i - 1] == n - 1 - m + i - 1) --i;
    if (i == 0) break;
    ++a[i - 1];
    for (std::size_t j = i; j < m; ++j) a[j] = a[j - 1] + 1;
  }
  return Skeleton::from_flat(n, k, std::move(flat));
}

// k-simplices over an explicit (k-1)-skeleton: candidates tau + w with
// w > max(tau), w adjacent to every vertex of tau and every facet present.
inline Skeleton sample_over_explicit(std::uint32_t n, int k, const Skeleton& below, const Skeleton& edges,
                                     StreamSelector& sel) {
  std::vector<Vertex> flat;
  const bool all_edges = edges.is_complete();
  std::vector<std::uint64_t> off;
  std::vector<Vertex> nbr;
  if (!all_edges) {
    std::vector<std::uint32_t> deg(n, 0);
    edges.for_each([&](std::uint64_t, const Simplex& e) {
      ++deg[e[0]];
      ++deg[e[1]];
    });
    off.assign(static_cast<std::size_t>(n) + 1, 0);
    for (std::uint32_t v = 0; v < n; ++v) off[v + 1] = off[v] + deg[v];
    nbr.resize(off[n]);
    std::vector<std::uint64_t> pos(off.begin(), off.end() - 1);
    edges.for_each([&](std::uint64_t, const Simplex& e) {
      nbr[pos[e[0]]++] = e[1];
      nbr[pos[e[1]]++] = e[0];
    });
    // edges are visited in lex order, so each list is already sorted
  }
  std::vector<Vertex> cand, tmp;
  below.for_each([&](std::uint64_t, const Simplex& tau) {
    const Vertex top = tau.back();
    cand.clear();
    if (all_edges) {
      for (Vertex w = top + 1; w < n; ++w) cand.push_back(w);
    } else {
      auto tail = [&](Vertex v) {
        auto b = nbr.begin() + static_cast<std::ptrdiff_t>(off[v]);
        auto e = nbr.begin() + static_cast<std::ptrdiff_t>(off[v + 1]);
        return std::pair{std::upper_bound(b, e, top), e};
      };
      auto [b0, e0] = tail(tau[0]);
      cand.assign(b0, e0);
      for (std::size_t i = 1; i < tau.size() && !cand.empty(); ++i) {
        auto [b, e] = tail(tau[i]);
        tmp.clear();
        std::set_intersection(cand.begin(), cand.end(), b, e, std::back_inserter(tmp));
        cand.swap(tmp);
      }
    }
    for (Vertex w : cand) {
      if (k >= 3) {
        bool ok = true;
        for (std::size_t i = 0; i < tau.size() && ok; ++i) ok = below.contains(tau.without_index(i).with(w));
        if (!ok) continue;
      }
      if (sel.take()) {
        flat.insert(flat.end(), tau.begin(), tau.end());
        flat.push_back(w);
      }
    }
  });
  return Skeleton::from_flat(n, k, std::move(flat));
}

}  // namespace detail

/// Draws one complex. Dimension k uses its own random stream, so lower
/// skeleta do not depend on p_k' for k' > k.
inline ComplexD sample(const GenParams& gp, const Seed& seed) {
  gp.validate();
  const auto counts = expected_counts(gp);
  {
    double stored = 0;
    bool complete_so_far = true;
    for (int k = 1; k <= gp.d; ++k) {
      complete_so_far = complete_so_far && gp.p_k(k) == 1.0;
      if (!complete_so_far) stored += counts[static_cast<std::size_t>(k)];
    }
    if (stored > gp.budget)
      throw resource_error("expected " + std::to_string(static_cast<std::uint64_t>(stored)) +
                           " stored simplices exceeds the budget of " +
                           std::to_string(static_cast<std::uint64_t>(gp.budget)));
  }
  std::vector<Skeleton> levels;
  levels.push_back(Skeleton::complete(gp.n, 0));
  bool complete = true;
  for (int k = 1; k <= gp.d; ++k) {
    const double pk = gp.p_k(k);
    const bool is_top = k == gp.d;
    if (complete && pk == 1.0 && !(is_top && gp.coupling_ceiling)) {
      levels.push_back(Skeleton::complete(gp.n, k));
      continue;
    }
    Rng rng = seed.stream(static_cast<std::uint64_t>(k));
    detail::StreamSelector sel(pk, rng, is_top ? gp.coupling_ceiling : std::nullopt);
    if (complete)
      levels.push_back(detail::sample_over_complete(gp.n, k, sel));
    else
      levels.push_back(detail::sample_over_explicit(gp.n, k, levels.back(), levels[1], sel));
    complete = false;
  }
  return ComplexD(gp.n, gp.d, std::move(levels));
}

}  // namespace rsc
