#include <catch_amalgamated.hpp>

#include <sstream>

#include "rsc/experiments.hpp"

namespace ex = rsc::exp;

namespace {

ex::SweepConfig small(std::vector<std::uint32_t> ns, std::vector<double> ls, std::uint64_t trials) {
  ex::SweepConfig c;
  c.n_grid = std::move(ns);
  c.lambda_grid = std::move(ls);
  c.trials = trials;
  c.seed = 17;
  return c;
}

std::string csv(const rsc::io::Table& t) {
  std::ostringstream os;
  rsc::io::write_table(os, t, rsc::io::Format::csv);
  return os.str();
}

}  // namespace

TEST_CASE("sweep output is reproducible and independent of thread count") {
  auto cfg = small({60, 90}, {0.5, 1.5}, 3);
  cfg.census_radius = 1;
  const auto a = csv(ex::sweep_table(ex::sweep(cfg), false));
  const auto b = csv(ex::sweep_table(ex::sweep(cfg), false));
  CHECK(a == b);
  cfg.threads = 3;
  const auto rows = ex::sweep(cfg);
  CHECK(csv(ex::sweep_table(rows, false)) == a);
  // Output order is (cell, trial).
  REQUIRE(rows.size() == 12);
  CHECK(rows[0].n == 60);
  CHECK(rows[0].lambda == 0.5);
  CHECK(rows[4].lambda == 1.5);
  CHECK(rows[5].trial == 2);
  CHECK(rows[11].n == 90);
  cfg.seed = 18;
  CHECK(csv(ex::sweep_table(ex::sweep(cfg), false)) != a);
}

TEST_CASE("lambda zero cells have only singleton components") {
  auto rows = ex::sweep(small({40}, {0.0}, 2));
  for (const auto& r : rows) {
    CHECK(r.error.empty());
    CHECK(r.s_dm1_total == 780);
    CHECK(r.s_dm1_cmax == 1);
    CHECK(r.n_components == r.s_dm1_total);
  }
}

TEST_CASE("coupled sweep is monotone along the lambda grid") {
  auto cfg = small({150}, {0.2, 0.4, 0.6, 1.0, 2.0}, 4);
  cfg.coupled = true;
  auto rows = ex::sweep(cfg);
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    double prev = 0;
    std::uint64_t prev_comp = UINT64_MAX;
    for (std::size_t ci = 0; ci < cfg.lambda_grid.size(); ++ci) {
      const auto& r = rows[ci * cfg.trials + t];
      const double f = static_cast<double>(r.s_dm1_cmax) / r.s_dm1_total;
      CHECK(f >= prev);
      CHECK(r.n_components <= prev_comp);
      prev = f;
      prev_comp = r.n_components;
    }
  }
}

TEST_CASE("giant fraction approaches the survival probability") {
  auto cfg = small({400}, {2.0}, 4);
  auto rows = ex::sweep(cfg);
  auto sum = ex::sweep_summary(cfg, rows);
  REQUIRE(sum.rows.size() == 1);
  const double zeta = std::get<double>(sum.rows[0][sum.column("zeta")]);
  const double frac = std::get<double>(sum.rows[0][sum.column("cmax_fraction")]);
  CHECK(zeta == Catch::Approx(0.8591901947).epsilon(1e-8));
  CHECK(std::abs(frac - zeta) < 0.03);
  CHECK(std::get<double>(sum.rows[0][sum.column("s0_fraction")]) == 1.0);
  CHECK(std::abs(std::get<double>(sum.rows[0][sum.column("density")]) -
                 std::get<double>(sum.rows[0][sum.column("density_theory")])) < 0.02);
}

TEST_CASE("cell budget flags the remaining trials") {
  auto cfg = small({50}, {1.0}, 3);
  cfg.cell_budget_s = 0;
  auto rows = ex::sweep(cfg);
  CHECK(rows[0].error.empty());
  CHECK(rows[1].error == "cell budget exceeded");
  CHECK(rows[2].error == "cell budget exceeded");
  auto t = ex::sweep_table(rows, true);
  CHECK(t.columns.back() == "elapsed_ms");
  auto sum = ex::sweep_summary(cfg, rows);
  CHECK(std::get<std::int64_t>(sum.rows[0][sum.column("errors")]) == 2);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(ex::sweep(small({}, {1.0}, 1)), rsc::config_error);
  CHECK_THROWS_AS(ex::sweep(small({50}, {}, 1)), rsc::config_error);
  CHECK_THROWS_AS(ex::sweep(small({50}, {-1.0}, 1)), rsc::config_error);
  auto deep = small({50}, {1.0}, 1);
  deep.census_radius = 4;
  CHECK_THROWS_AS(ex::sweep(deep), rsc::config_error);

  auto m = small({400}, {1.0}, 1);
  m.model = rsc::Model::mrsc;
  CHECK_THROWS_AS(m.validate(), rsc::config_error);
  m.alpha1 = 0.25;
  CHECK_NOTHROW(m.validate());
  CHECK_FALSE(m.out_of_theory(1.0));
  CHECK(m.out_of_theory(64.0));
  m.lambda_grid = {100.0};  // needs p_2 > 1 at n = 400
  CHECK_THROWS_AS(m.validate(), rsc::config_error);
}

TEST_CASE("mrsc sweep rows carry alpha1") {
  auto cfg = small({300}, {2.0}, 2);
  cfg.model = rsc::Model::mrsc;
  cfg.alpha1 = 0.25;
  auto rows = ex::sweep(cfg);
  for (const auto& r : rows) {
    CHECK(r.alpha1 == 0.25);
    CHECK(r.model == rsc::Model::mrsc);
    CHECK_FALSE(r.out_of_theory);
    CHECK(r.s_dm1_total < 300u * 299u / 2u);
  }
}

TEST_CASE("theory table") {
  auto t = ex::theory_table({0.3, 2.0}, 2);
  REQUIRE(t.rows.size() == 2);
  CHECK(std::get<double>(t.rows[0][t.column("gamma")]) == 1.0);
  CHECK(std::get<double>(t.rows[0][t.column("density")]) == Catch::Approx(0.8));
  CHECK(std::get<double>(t.rows[0][t.column("C")]) == Catch::Approx(1.1 * 4 / (0.3 - 1 - std::log(0.3))));
  CHECK(std::holds_alternative<std::monostate>(t.rows[1][t.column("c")]));
  CHECK(std::get<double>(t.rows[1][t.column("zeta")]) == Catch::Approx(0.8591901947));
}

TEST_CASE("lwc table") {
  auto cfg = small({200}, {1.5}, 2);
  auto t = ex::lwc_table(cfg);
  REQUIRE(t.rows.size() == 2);
  for (const auto& row : t.rows) {
    CHECK(std::get<std::int64_t>(row[t.column("radius")]) == 1);
    CHECK(std::get<double>(row[t.column("census_tv")]) < 0.1);
    CHECK(std::abs(std::get<double>(row[t.column("density")]) - std::get<double>(row[t.column("density_theory")])) <
          0.03);
  }
}

TEST_CASE("subcritical report") {
  auto bad = small({256}, {0.6}, 1);
  CHECK_THROWS_AS(ex::subcritical_rows(bad), rsc::config_error);

  auto cfg = small({128, 256, 512}, {0.2}, 6);
  auto rows = ex::subcritical_rows(cfg);
  auto t = ex::subcritical_table(cfg, rows);
  REQUIRE(t.rows.size() == 18);
  for (const auto& row : t.rows) {
    const auto s = std::get<std::int64_t>(row[t.column("s_cmax")]);
    CHECK(s >= 1);
    CHECK(std::get<double>(row[t.column("ratio")]) ==
          Catch::Approx(s / std::get<double>(row[t.column("log_n")])));
  }
  auto sum = ex::subcritical_summary(cfg, rows);
  REQUIRE(sum.rows.size() == 3);
  const double lo = std::get<double>(sum.rows[0][sum.column("slope_lo")]);
  const double hi = std::get<double>(sum.rows[0][sum.column("slope_hi")]);
  CHECK(lo <= hi);
  CHECK(std::get<double>(sum.rows[0][sum.column("C_offspring")]) >
        std::get<double>(sum.rows[0][sum.column("C")]));

  // Nearly empty complexes: the largest component is a single ridge.
  auto tiny = ex::subcritical_rows(small({200}, {1e-9}, 3));
  for (const auto& r : tiny) CHECK(r.s_cmax == 1);
}

TEST_CASE("vertex report") {
  auto m = small({100}, {1.0}, 1);
  m.model = rsc::Model::mrsc;
  m.alpha1 = 0.25;
  CHECK_THROWS_AS(ex::vertex_rows(m, {}), rsc::config_error);

  auto cfg = small({600}, {1.0}, 2);
  auto rows = ex::vertex_rows(cfg, {0.0, 0.5, 1.0});
  for (const auto& r : rows) {
    CHECK(r.s0_cmax > 550);
    REQUIRE(r.curve.points.size() == 3);
    CHECK(std::abs(r.curve.points[2].v - r.curve.points[2].theory) < 0.06);
  }
  auto t = ex::vertex_table(rows);
  CHECK(std::get<double>(t.rows[0][t.column("curve_sup")]) < 0.06);
  CHECK(ex::curve_table(rows).rows.size() == 6);
}

TEST_CASE("connect report") {
  // Every triangle present: a single component.
  auto full = small({10}, {10.0}, 2);
  auto rows = ex::connect_rows(full, 2, 200);
  auto t = ex::connect_table(full, rows, 2);
  for (const auto& row : t.rows) CHECK(std::get<double>(row[t.column("ratio")]) == 1.0);

  auto sub = small({300}, {0.2}, 1);
  auto srows = ex::connect_rows(sub, 50, 500);
  auto st = ex::connect_table(sub, srows, 50);
  CHECK(std::get<bool>(st.rows[0][st.column("subcritical")]));
  CHECK(std::get<double>(st.rows[0][st.column("p_both")]) == 0.0);
}
