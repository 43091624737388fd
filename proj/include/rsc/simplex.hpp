#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rsc/errors.hpp"

namespace rsc {

using Vertex = std::uint32_t;

// Largest supported simplex has this many vertices (dimension 7).
inline constexpr std::size_t kMaxVertices = 8;

/// A finite set of vertices stored as its strictly increasing tuple.
///
/// Storage is inline; the dimension is `size() - 1`. Construction sorts and
/// rejects duplicates, so every Simplex value is a canonical representative.
class Simplex {
 public:
  Simplex() = default;

  Simplex(std::initializer_list<Vertex> vs) : Simplex(std::span<const Vertex>(vs.begin(), vs.size())) {}

  explicit Simplex(std::span<const Vertex> vs) {
    if (vs.empty()) throw dimension_error("simplex must have at least one vertex");
    if (vs.size() > kMaxVertices)
      throw dimension_error("simplex has " + std::to_string(vs.size()) + " vertices, max is " +
                            std::to_string(kMaxVertices));
    size_ = static_cast<std::uint8_t>(vs.size());
    std::copy(vs.begin(), vs.end(), v_.begin());
    std::sort(v_.begin(), v_.begin() + size_);
    if (std::adjacent_find(v_.begin(), v_.begin() + size_) != v_.begin() + size_)
      throw dimension_error("simplex has repeated vertices");
  }

  // Builds from an already strictly increasing tuple without checks.
  static Simplex from_sorted(std::span<const Vertex> vs) {
    Simplex s;
    s.size_ = static_cast<std::uint8_t>(vs.size());
    std::copy(vs.begin(), vs.end(), s.v_.begin());
    return s;
  }

  std::size_t size() const { return size_; }
  int dim() const { return static_cast<int>(size_) - 1; }
  bool empty() const { return size_ == 0; }

  Vertex operator[](std::size_t i) const { return v_[i]; }
  const Vertex* begin() const { return v_.data(); }
  const Vertex* end() const { return v_.data() + size_; }
  std::span<const Vertex> vertices() const { return {v_.data(), size_}; }
  Vertex front() const { return v_[0]; }
  Vertex back() const { return v_[size_ - 1]; }

  bool contains(Vertex v) const { return std::binary_search(begin(), end(), v); }

  bool contains(const Simplex& other) const {
    return std::includes(begin(), end(), other.begin(), other.end());
  }

  // Face obtained by dropping the vertex at position i.
  Simplex without_index(std::size_t i) const {
    Simplex s;
    s.size_ = static_cast<std::uint8_t>(size_ - 1);
    std::copy(v_.begin(), v_.begin() + i, s.v_.begin());
    std::copy(v_.begin() + i + 1, v_.begin() + size_, s.v_.begin() + i);
    return s;
  }

  Simplex without(Vertex v) const {
    auto it = std::lower_bound(begin(), end(), v);
    if (it == end() || *it != v) throw membership_error("vertex not in simplex");
    return without_index(static_cast<std::size_t>(it - begin()));
  }

  Simplex with(Vertex v) const {
    if (size_ == kMaxVertices) throw dimension_error("simplex dimension limit reached");
    auto it = std::lower_bound(begin(), end(), v);
    if (it != end() && *it == v) throw dimension_error("vertex already in simplex");
    Simplex s;
    s.size_ = static_cast<std::uint8_t>(size_ + 1);
    auto pos = static_cast<std::size_t>(it - begin());
    std::copy(v_.begin(), v_.begin() + pos, s.v_.begin());
    s.v_[pos] = v;
    std::copy(v_.begin() + pos, v_.begin() + size_, s.v_.begin() + pos + 1);
    return s;
  }

  friend bool operator==(const Simplex& a, const Simplex& b) {
    return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
  }
  // Lexicographic on the vertex tuple; shorter tuples first on a shared prefix.
  friend auto operator<=>(const Simplex& a, const Simplex& b) {
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
  }

  std::string str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < size_; ++i) {
      if (i) out += ",";
      out += std::to_string(v_[i]);
    }
    return out + "}";
  }

  friend std::ostream& operator<<(std::ostream& os, const Simplex& s) { return os << s.str(); }

 private:
  std::array<Vertex, kMaxVertices> v_{};
  std::uint8_t size_ = 0;
};

struct SimplexHash {
  std::size_t operator()(const Simplex& s) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ s.size();
    for (Vertex v : s) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// Binomial coefficient C(n, k); saturates at UINT64_MAX on overflow.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(r);
}

inline double binomial_real(double n, int k) {
  if (k < 0 || n < k) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= (n - k + i) / i;
  return r;
}

/// All k-dimensional faces of s, in lexicographic order.
inline std::vector<Simplex> faces(const Simplex& s, int k) {
  if (k < 0 || k > s.dim())
    throw dimension_error("face dimension " + std::to_string(k) + " out of range for " + s.str());
  const std::size_t m = static_cast<std::size_t>(k) + 1;
  const std::size_t n = s.size();
  std::vector<Simplex> out;
  std::array<std::size_t, kMaxVertices> idx{};
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  std::array<Vertex, kMaxVertices> buf{};
  while (true) {
    for (std::size_t i = 0; i < m; ++i) buf[i] = s[idx[i]];
    out.push_back(Simplex::from_sorted({buf.data(), m}));
    std::size_t i = m;
    while (i > 0 && idx[i - 1] == n - m + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace rsc

template <>
struct std::hash<rsc::Simplex> : rsc::SimplexHash {};
