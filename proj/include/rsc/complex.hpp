#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rsc/errors.hpp"
#include "rsc/simplex.hpp"

namespace rsc {

/// The set S_k of k-simplices of a complex on the vertex universe [n].
///
/// Two representations share one interface: an explicit sorted table of
/// vertex tuples, or the implicit complete set of all (k+1)-subsets of [n]
/// (used for the full lower skeleta of Linial-Meshulam complexes). In both,
/// a simplex's id is its position in lexicographic order, so ids are dense
/// and order-compatible with the simplices themselves.
class Skeleton {
 public:
  Skeleton() = default;

  // `sorted` must be strictly increasing in lexicographic order, all of dimension k.
  static Skeleton from_sorted(std::uint32_t n, int k, const std::vector<Simplex>& sorted) {
    Skeleton s(n, k, false);
    s.flat_.reserve(sorted.size() * s.width());
    for (const auto& x : sorted) s.flat_.insert(s.flat_.end(), x.begin(), x.end());
    s.count_ = sorted.size();
    return s;
  }

  static Skeleton from_flat(std::uint32_t n, int k, std::vector<Vertex> flat) {
    Skeleton s(n, k, false);
    s.count_ = flat.size() / s.width();
    s.flat_ = std::move(flat);
    return s;
  }

  static Skeleton complete(std::uint32_t n, int k) {
    Skeleton s(n, k, true);
    s.count_ = binomial(n, static_cast<std::uint64_t>(k) + 1);
    if (s.count_ == UINT64_MAX) throw resource_error("complete skeleton size overflows 64 bits");
    // C(x, j) for x <= n, j <= k + 1, so ranking needs no arithmetic beyond lookups.
    const std::size_t m = s.width();
    auto table = std::make_shared<std::vector<std::uint64_t>>((m + 1) * (static_cast<std::size_t>(n) + 1));
    for (std::size_t j = 0; j <= m; ++j)
      for (std::uint64_t x = 0; x <= n; ++x) (*table)[j * (n + 1) + x] = binomial(x, j);
    s.binom_ptr_ = table->data();
    s.binom_ = std::move(table);
    return s;
  }

  int dim() const { return k_; }
  std::size_t width() const { return static_cast<std::size_t>(k_) + 1; }
  std::uint64_t size() const { return count_; }
  bool is_complete() const { return complete_; }
  std::uint32_t universe() const { return n_; }

  std::optional<std::uint64_t> index_of(const Simplex& s) const {
    if (s.size() != width()) return std::nullopt;
    if (s.back() >= n_) return std::nullopt;
    if (complete_) return lex_rank(s);
    std::uint64_t lo = 0, hi = count_;
    const std::size_t w = width();
    while (lo < hi) {
      std::uint64_t mid = (lo + hi) / 2;
      const Vertex* row = flat_.data() + mid * w;
      if (std::lexicographical_compare(row, row + w, s.begin(), s.end()))
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo < count_ && std::equal(s.begin(), s.end(), flat_.data() + lo * w)) return lo;
    return std::nullopt;
  }

  bool contains(const Simplex& s) const { return index_of(s).has_value(); }

  Simplex at(std::uint64_t id) const {
    if (id >= count_) throw dimension_error("simplex id out of range");
    if (complete_) return lex_unrank(id);
    return Simplex::from_sorted({flat_.data() + id * width(), width()});
  }

  // Visits (id, simplex) in lexicographic order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    if (!complete_) {
      for (std::uint64_t i = 0; i < count_; ++i)
        fn(i, Simplex::from_sorted({flat_.data() + i * width(), width()}));
      return;
    }
    const std::size_t m = width();
    if (m > n_) return;
    std::array<Vertex, kMaxVertices> a{};
    for (std::size_t i = 0; i < m; ++i) a[i] = static_cast<Vertex>(i);
    std::uint64_t id = 0;
    while (true) {
      fn(id++, Simplex::from_sorted({a.data(), m}));
      std::size_t i = m;
      while (i > 0 && a[i - 1] == n_ - m + i - 1) --i;
      if (i == 0) break;
      ++a[i - 1];
      for (std::size_t j = i; j < m; ++j) a[j] = a[j - 1] + 1;
    }
  }

  const std::vector<Vertex>& flat() const { return flat_; }

  // Lexicographic rank of s among all (k+1)-subsets of [n].
  std::uint64_t lex_rank(const Simplex& s) const {
    const std::uint64_t m = s.size();
    std::uint64_t r = 0;
    std::int64_t prev = -1;
    for (std::uint64_t i = 0; i < m; ++i) {
      r += choose(n_ - static_cast<std::uint64_t>(prev + 1), m - i) - choose(n_ - s[i], m - i);
      prev = s[i];
    }
    return r;
  }

  Simplex lex_unrank(std::uint64_t id) const {
    const std::uint64_t m = width();
    std::array<Vertex, kMaxVertices> a{};
    std::int64_t prev = -1;
    for (std::uint64_t i = 0; i < m; ++i) {
      // Largest x with (#subsets whose i-th element is < x) <= id.
      const std::uint64_t base = choose(n_ - static_cast<std::uint64_t>(prev + 1), m - i);
      std::uint64_t lo = static_cast<std::uint64_t>(prev + 1), hi = n_ - (m - i);
      while (lo < hi) {
        std::uint64_t mid = (lo + hi + 1) / 2;
        if (base - choose(n_ - mid, m - i) <= id)
          lo = mid;
        else
          hi = mid - 1;
      }
      id -= base - choose(n_ - lo, m - i);
      a[i] = static_cast<Vertex>(lo);
      prev = static_cast<std::int64_t>(lo);
    }
    return Simplex::from_sorted({a.data(), m});
  }

 private:
  Skeleton(std::uint32_t n, int k, bool complete) : n_(n), k_(k), complete_(complete) {}

  std::uint64_t choose(std::uint64_t x, std::uint64_t j) const {
    // Small j in closed form: x < 2^32, so x(x-1)/2 fits in 64 bits.
    if (j == 1) return x;
    if (j == 2) return x * (x - (x > 0)) / 2;
    if (binom_ptr_) return binom_ptr_[j * (static_cast<std::uint64_t>(n_) + 1) + x];
    return binomial(x, j);
  }

  std::uint32_t n_ = 0;
  int k_ = 0;
  bool complete_ = false;
  std::uint64_t count_ = 0;
  std::vector<Vertex> flat_;
  std::shared_ptr<const std::vector<std::uint64_t>> binom_;
  const std::uint64_t* binom_ptr_ = nullptr;
};

/// A finite simplicial complex of top dimension d on the vertex universe [n].
///
/// Immutable once built. S_d may be empty; `d()` is the declared top
/// dimension, not the realized one.
class ComplexD {
 public:
  ComplexD() = default;

  ComplexD(std::uint32_t n, int d, std::vector<Skeleton> levels)
      : n_(n), d_(d), levels_(std::move(levels)) {
    if (d_ < 0 || static_cast<std::size_t>(d_) + 1 > kMaxVertices)
      throw dimension_error("top dimension " + std::to_string(d_) + " unsupported");
    if (levels_.size() != static_cast<std::size_t>(d_) + 1)
      throw dimension_error("expected one skeleton per dimension 0..d");
  }

  /// Downward closure of a list of generating simplices (any dimensions <= d).
  static ComplexD from_simplices(std::uint32_t n, int d, std::span<const Simplex> gens) {
    std::vector<std::vector<Simplex>> levels(static_cast<std::size_t>(d) + 1);
    for (const auto& g : gens) {
      if (g.dim() > d) throw dimension_error("generator " + g.str() + " exceeds top dimension");
      if (g.back() >= n) throw dimension_error("vertex id out of range in " + g.str());
      levels[static_cast<std::size_t>(g.dim())].push_back(g);
    }
    // Close top-down so each level only needs the facets of the level above.
    for (int k = d; k >= 1; --k) {
      auto& lvl = levels[static_cast<std::size_t>(k)];
      std::sort(lvl.begin(), lvl.end());
      lvl.erase(std::unique(lvl.begin(), lvl.end()), lvl.end());
      auto& below = levels[static_cast<std::size_t>(k) - 1];
      for (const auto& s : lvl)
        for (std::size_t i = 0; i < s.size(); ++i) below.push_back(s.without_index(i));
    }
    auto& v = levels[0];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return from_levels(n, d, levels);
  }

  static ComplexD from_levels(std::uint32_t n, int d, const std::vector<std::vector<Simplex>>& levels) {
    std::vector<Skeleton> sk;
    sk.reserve(levels.size());
    for (int k = 0; k <= d; ++k) sk.push_back(Skeleton::from_sorted(n, k, levels[static_cast<std::size_t>(k)]));
    return ComplexD(n, d, std::move(sk));
  }

  /// Complete (d-1)-skeleton on [n] plus the given d-simplices (sorted, unique).
  static ComplexD with_complete_lower(std::uint32_t n, int d, Skeleton top) {
    std::vector<Skeleton> sk;
    for (int k = 0; k < d; ++k) sk.push_back(Skeleton::complete(n, k));
    sk.push_back(std::move(top));
    return ComplexD(n, d, std::move(sk));
  }

  std::uint32_t n() const { return n_; }
  int d() const { return d_; }

  const Skeleton& skeleton(int k) const {
    if (k < 0 || k > d_) throw dimension_error("skeleton dimension out of range");
    return levels_[static_cast<std::size_t>(k)];
  }
  const Skeleton& ridges() const { return skeleton(d_ - 1); }
  const Skeleton& tops() const { return skeleton(d_); }

  std::uint64_t count(int k) const { return skeleton(k).size(); }

  bool contains(const Simplex& s) const {
    if (s.empty() || s.dim() > d_) return false;
    return levels_[static_cast<std::size_t>(s.dim())].contains(s);
  }

  std::optional<std::uint64_t> ridge_id(const Simplex& s) const {
    if (d_ < 1) return std::nullopt;
    return ridges().index_of(s);
  }

  std::uint64_t require_ridge(const Simplex& s) const {
    auto id = ridge_id(s);
    if (!id) throw membership_error(s.str() + " is not a (d-1)-simplex of the complex");
    return *id;
  }

  /// Checks downward closure and the vertex range; returns an error message or empty.
  std::string validate() const {
    for (int k = 0; k <= d_; ++k) {
      const auto& sk = skeleton(k);
      if (sk.is_complete()) continue;
      std::string err;
      sk.for_each([&](std::uint64_t, const Simplex& s) {
        if (!err.empty()) return;
        if (s.back() >= n_) err = "vertex out of range in " + s.str();
        if (k > 0)
          for (std::size_t i = 0; i < s.size() && err.empty(); ++i)
            if (!contains(s.without_index(i))) err = "face of " + s.str() + " missing";
      });
      if (!err.empty()) return err;
    }
    return {};
  }

  /// Maximal simplices (no cofacet in the complex), by dimension then lexicographically.
  std::vector<Simplex> maximal_simplices() const {
    std::vector<Simplex> out;
    for (int k = 0; k <= d_; ++k) {
      if (k == d_) {
        tops().for_each([&](std::uint64_t, const Simplex& s) { out.push_back(s); });
        break;
      }
      const auto& up = skeleton(k + 1);
      std::vector<char> covered(skeleton(k).size(), 0);
      up.for_each([&](std::uint64_t, const Simplex& s) {
        for (std::size_t i = 0; i < s.size(); ++i) covered[*skeleton(k).index_of(s.without_index(i))] = 1;
      });
      skeleton(k).for_each([&](std::uint64_t id, const Simplex& s) {
        if (!covered[id]) out.push_back(s);
      });
    }
    return out;
  }

  friend bool same_simplices(const ComplexD& a, const ComplexD& b) {
    if (a.n_ != b.n_ || a.d_ != b.d_) return false;
    for (int k = 0; k <= a.d_; ++k) {
      const auto& x = a.skeleton(k);
      const auto& y = b.skeleton(k);
      if (x.size() != y.size()) return false;
      if (!x.is_complete() && !y.is_complete()) {
        if (x.flat() != y.flat()) return false;
        continue;
      }
      bool same = true;
      x.for_each([&](std::uint64_t id, const Simplex& s) {
        if (same && y.at(id) != s) same = false;
      });
      if (!same) return false;
    }
    return true;
  }

 private:
  std::uint32_t n_ = 0;
  int d_ = 0;
  std::vector<Skeleton> levels_;
};

/// Q(s): the complex of all non-empty subsets of s, with top dimension
/// `d` (defaults to dim(s)) on the universe [n] (defaults to max(s)+1).
inline ComplexD downward_closure(const Simplex& s, int d = -1, std::uint32_t n = 0) {
  if (d < 0) d = s.dim();
  if (n == 0) n = s.back() + 1;
  if (s.dim() > d) throw dimension_error("simplex exceeds target dimension");
  std::vector<Simplex> g{s};
  return ComplexD::from_simplices(n, d, g);
}

/// True iff a and b are distinct (d-1)-simplices of X sharing a d-simplex of X.
inline bool adjacent(const Simplex& a, const Simplex& b, const ComplexD& x) {
  x.require_ridge(a);
  x.require_ridge(b);
  if (a == b) return false;
  std::array<Vertex, 2 * kMaxVertices> u{};
  auto end = std::set_union(a.begin(), a.end(), b.begin(), b.end(), u.begin());
  const auto m = static_cast<std::size_t>(end - u.begin());
  if (m != static_cast<std::size_t>(x.d()) + 1) return false;
  return x.tops().contains(Simplex::from_sorted({u.data(), m}));
}

/// Map from each (d-1)-simplex id to the ids of the d-simplices containing it.
///
/// Only ridges with at least one cofacet are stored, so the index is
/// proportional to s_d even when S_{d-1} is an implicit complete skeleton.
class CofacetIndex {
 public:
  CofacetIndex() = default;

  explicit CofacetIndex(const ComplexD& x) {
    const auto& ridges = x.ridges();
    std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs;
    pairs.reserve(x.tops().size() * (static_cast<std::size_t>(x.d()) + 1));
    if (x.tops().size() > UINT32_MAX) throw resource_error("too many d-simplices for the cofacet index");
    x.tops().for_each([&](std::uint64_t t, const Simplex& s) {
      for (std::size_t i = 0; i < s.size(); ++i)
        pairs.emplace_back(*ridges.index_of(s.without_index(i)), static_cast<std::uint32_t>(t));
    });
    std::sort(pairs.begin(), pairs.end());
    offsets_.push_back(0);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (i == 0 || pairs[i].first != pairs[i - 1].first) {
        if (i) offsets_.push_back(tops_.size());
        keys_.push_back(pairs[i].first);
      }
      tops_.push_back(pairs[i].second);
    }
    if (!pairs.empty()) offsets_.push_back(tops_.size());
  }

  std::span<const std::uint32_t> cofacets(std::uint64_t ridge) const {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), ridge);
    if (it == keys_.end() || *it != ridge) return {};
    auto i = static_cast<std::size_t>(it - keys_.begin());
    return {tops_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  // Ridges with at least one cofacet, ascending.
  const std::vector<std::uint64_t>& touched() const { return keys_; }

 private:
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint64_t> offsets_;
  std::vector<std::uint32_t> tops_;
};

}  // namespace rsc
