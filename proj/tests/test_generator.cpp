#include <catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "rsc/generator.hpp"

using rsc::GenParams;
using rsc::Seed;
using rsc::Simplex;

namespace {

GenParams mrsc(std::uint32_t n, std::vector<double> p) {
  GenParams gp;
  gp.n = n;
  gp.d = static_cast<int>(p.size());
  gp.p = std::move(p);
  gp.validate();
  return gp;
}

}  // namespace

TEST_CASE("derived parameters") {
  auto a = rsc::derive_params(mrsc(100, {1.0, 0.02}));
  CHECK(a.q == 1.0);
  CHECK(a.r == Catch::Approx(0.02));
  CHECK(a.lambda == Catch::Approx(2.0));

  auto b = rsc::derive_params(mrsc(10, {0.5, 0.1}));
  CHECK(b.q == Catch::Approx(0.5));
  CHECK(b.r == Catch::Approx(0.025));

  auto c = rsc::derive_params(mrsc(10, {1.0, 1.0, 0.3}));
  CHECK(c.q == 1.0);
  CHECK(c.r == Catch::Approx(0.3));
}

TEST_CASE("supercritical bound") {
  CHECK(std::isinf(rsc::supercritical_bound(0.0)));
  CHECK(rsc::supercritical_bound(0.5) == Catch::Approx(4.0));
  CHECK(rsc::supercritical_bound(0.25) == Catch::Approx(64.0));
  CHECK_THROWS_AS(rsc::supercritical_bound(0.6), rsc::domain_error);
}

TEST_CASE("expected counts") {
  auto lm = rsc::expected_counts(rsc::lm_params(50, 2, 1.0));
  CHECK(lm[1] == Catch::Approx(1225.0));
  CHECK(lm[2] == Catch::Approx(19600.0 / 50));
  auto e = rsc::expected_counts(mrsc(4, {0.5, 0.5}));
  CHECK(e[1] == Catch::Approx(3.0));
  auto gp = mrsc(30, {0.4, 0.3, 0.2});
  CHECK(rsc::expected_counts(gp)[2] == Catch::Approx(rsc::binomial_real(30, 3) * rsc::derive_params(gp).q));
}

TEST_CASE("parameter validation") {
  GenParams gp = mrsc(10, {0.5, 0.5});
  gp.p = {0.5, 1.5};
  CHECK_THROWS_AS(gp.validate(), rsc::config_error);
  gp.p = {0.5, 0.5};
  gp.model = rsc::Model::lm;
  CHECK_THROWS_AS(gp.validate(), rsc::config_error);
  CHECK_THROWS_AS(rsc::mrsc_lambda_params(10, {0.01}, 5.0), rsc::config_error);
  auto lam = rsc::mrsc_lambda_params(1000, {0.5}, 2.0);
  CHECK(rsc::derive_params(lam).lambda == Catch::Approx(2.0).epsilon(1e-12));
  CHECK(lam.model == rsc::Model::mrsc);
  CHECK(rsc::mrsc_lambda_params(1000, {1.0}, 2.0).model == rsc::Model::lm);
  auto al = rsc::mrsc_alpha_params(1000, 0.25, 1.5);
  CHECK(al.p[0] == Catch::Approx(std::pow(1000.0, -0.25)));
  CHECK(*al.alpha2 == Catch::Approx(0.5));
}

TEST_CASE("degenerate probabilities") {
  auto empty = rsc::sample(mrsc(30, {0.0, 0.7}), Seed{1, 0});
  CHECK(empty.count(0) == 30);
  CHECK(empty.count(1) == 0);
  CHECK(empty.count(2) == 0);

  auto full = rsc::sample(mrsc(9, {1.0, 1.0}), Seed{1, 0});
  CHECK(full.count(1) == 36);
  CHECK(full.count(2) == 84);
  auto full3 = rsc::sample(mrsc(8, {1.0, 1.0, 1.0}), Seed{1, 0});
  CHECK(full3.count(2) == 56);
  CHECK(full3.count(3) == 70);
}

TEST_CASE("samples are closed and deterministic") {
  for (auto p : {std::vector<double>{0.6, 0.5}, std::vector<double>{0.8, 0.7, 0.6}, std::vector<double>{1.0, 0.3}}) {
    auto gp = mrsc(25, p);
    auto a = rsc::sample(gp, Seed{42, 3});
    auto b = rsc::sample(gp, Seed{42, 3});
    auto c = rsc::sample(gp, Seed{42, 4});
    CHECK(a.validate().empty());
    CHECK(same_simplices(a, b));
    CHECK_FALSE(same_simplices(a, c));
  }
}

TEST_CASE("every candidate is considered") {
  // With p_2 = 1 the top layer must be exactly the triangles of the sampled graph.
  auto x = rsc::sample(mrsc(40, {0.3, 1.0}), Seed{5, 0});
  std::uint64_t triangles = 0;
  for (rsc::Vertex a = 0; a < 40; ++a)
    for (rsc::Vertex b = a + 1; b < 40; ++b)
      for (rsc::Vertex c = b + 1; c < 40; ++c)
        if (x.contains(Simplex{a, b}) && x.contains(Simplex{a, c}) && x.contains(Simplex{b, c})) ++triangles;
  CHECK(x.count(2) == triangles);

  auto y = rsc::sample(mrsc(16, {0.6, 0.8, 1.0}), Seed{6, 0});
  std::uint64_t tets = 0;
  for (rsc::Vertex a = 0; a < 16; ++a)
    for (rsc::Vertex b = a + 1; b < 16; ++b)
      for (rsc::Vertex c = b + 1; c < 16; ++c)
        for (rsc::Vertex d = c + 1; d < 16; ++d) {
          Simplex t{a, b, c, d};
          bool all = true;
          for (const auto& f : rsc::faces(t, 2)) all = all && y.contains(f);
          tets += all;
        }
  CHECK(y.count(3) == tets);
}

TEST_CASE("LM triangle count matches the binomial mean") {
  const std::uint32_t n = 200;
  auto gp = rsc::lm_params(n, 2, 1.0);
  const int trials = 500;
  double sum = 0;
  for (int t = 0; t < trials; ++t) sum += static_cast<double>(rsc::sample(gp, Seed{7, static_cast<std::uint64_t>(t)}).count(2));
  const double N = rsc::binomial_real(n, 3), p = 1.0 / n;
  const double mean = N * p, sd = std::sqrt(N * p * (1 - p) / trials);
  CHECK(std::abs(sum / trials - mean) <= 3 * sd);
}

TEST_CASE("MRSC counts match their means") {
  auto gp = mrsc(60, {0.4, 0.5});
  const int trials = 300;
  double e1 = 0, e2 = 0;
  for (int t = 0; t < trials; ++t) {
    auto x = rsc::sample(gp, Seed{8, static_cast<std::uint64_t>(t)});
    e1 += static_cast<double>(x.count(1));
    e2 += static_cast<double>(x.count(2));
  }
  const double m1 = rsc::binomial_real(60, 2) * 0.4;
  const double m2 = rsc::binomial_real(60, 3) * std::pow(0.4, 3) * 0.5;
  CHECK(e1 / trials == Catch::Approx(m1).epsilon(0.01));
  CHECK(e2 / trials == Catch::Approx(m2).epsilon(0.03));
}

TEST_CASE("ridge count concentrates") {
  double prev_spread = 1e9;
  for (std::uint32_t n : {100u, 200u, 400u}) {
    auto gp = rsc::mrsc_lambda_params(n, {0.3}, 1.0);
    double lo = 1e9, hi = 0;
    for (int t = 0; t < 20; ++t) {
      auto x = rsc::sample(gp, Seed{9, static_cast<std::uint64_t>(t)});
      const double ratio = static_cast<double>(x.count(1)) / (rsc::binomial_real(n, 2) * 0.3);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK(lo > 0.9);
    CHECK(hi < 1.1);
    CHECK(hi - lo < prev_spread * 1.2);
    prev_spread = hi - lo;
  }
}

TEST_CASE("coupled draws are nested in p_d") {
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    std::vector<rsc::ComplexD> xs;
    for (double lambda : {0.5, 1.0, 2.0}) {
      auto gp = rsc::mrsc_lambda_params(60, {0.5}, lambda);
      gp.coupling_ceiling = rsc::mrsc_lambda_params(60, {0.5}, 2.0).p.back();
      xs.push_back(rsc::sample(gp, Seed{10, trial}));
    }
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      CHECK(same_simplices(rsc::ComplexD(60, 1, {xs[i].skeleton(0), xs[i].skeleton(1)}),
                           rsc::ComplexD(60, 1, {xs[i + 1].skeleton(0), xs[i + 1].skeleton(1)})));
      xs[i].tops().for_each([&](std::uint64_t, const Simplex& t) { CHECK(xs[i + 1].contains(t)); });
      CHECK(xs[i].count(2) <= xs[i + 1].count(2));
    }
  }
}

TEST_CASE("coupled draws keep the marginal law") {
  auto gp = rsc::lm_params(100, 2, 1.0);
  gp.coupling_ceiling = 0.05;
  double sum = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) sum += static_cast<double>(rsc::sample(gp, Seed{11, static_cast<std::uint64_t>(t)}).count(2));
  const double N = rsc::binomial_real(100, 3), p = 0.01;
  CHECK(std::abs(sum / trials - N * p) <= 3 * std::sqrt(N * p * (1 - p) / trials));
}

TEST_CASE("vertex labels are exchangeable") {
  // Degree of a low-numbered vertex and of a high-numbered vertex have the same law.
  auto gp = mrsc(50, {0.3, 0.5});
  double lo = 0, hi = 0, lo2 = 0, hi2 = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    auto x = rsc::sample(gp, Seed{12, static_cast<std::uint64_t>(t)});
    double a = 0, b = 0;
    x.tops().for_each([&](std::uint64_t, const Simplex& s) {
      a += s.contains(0) + s.contains(1);
      b += s.contains(48) + s.contains(49);
    });
    lo += a;
    hi += b;
    lo2 += a * a;
    hi2 += b * b;
  }
  const double ma = lo / trials, mb = hi / trials;
  const double se = std::sqrt((lo2 / trials - ma * ma + hi2 / trials - mb * mb) / trials);
  CHECK(std::abs(ma - mb) <= 4 * se);
}

TEST_CASE("memory budget") {
  auto gp = rsc::lm_params(100000, 2, 1.0);
  gp.p.back() = 0.5;
  CHECK_THROWS_AS(rsc::sample(gp, Seed{1, 0}), rsc::resource_error);
}

TEST_CASE("seeds give distinct streams") {
  Seed a{1, 0}, b{1, 1}, c{2, 0};
  CHECK(a.stream_seed(1) != b.stream_seed(1));
  CHECK(a.stream_seed(1) != c.stream_seed(1));
  CHECK(a.stream_seed(1) != a.stream_seed(2));
  CHECK(a.stream_seed(1) == Seed{1, 0}.stream_seed(1));
}
