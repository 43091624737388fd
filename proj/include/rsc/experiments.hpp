#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rsc/branching.hpp"
#include "rsc/components.hpp"
#include "rsc/errors.hpp"
#include "rsc/exploration.hpp"
#include "rsc/generator.hpp"
#include "rsc/io.hpp"
#include "rsc/stats.hpp"

namespace rsc::exp {

using io::Cell;
using io::Table;

struct SweepConfig {
  Model model = Model::lm;
  int d = 2;
  std::vector<std::uint32_t> n_grid;
  std::vector<double> lambda_grid;
  std::optional<double> alpha1;  // mrsc, d = 2: p_1 = n^{-alpha1}
  std::vector<double> p_lower;   // mrsc: fixed p_1..p_{d-1} when alpha1 is unset
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  int census_radius = 0;          // 0: no census
  std::uint64_t census_cap = 0;   // 0: every ridge
  bool coupled = false;
  unsigned threads = 1;
  double cell_budget_s = 120;
  bool timing = false;

  void validate() const {
    if (d < 1 || d > 7) throw config_error("d must lie in [1, 7]");
    if (n_grid.empty()) throw config_error("empty n grid");
    if (lambda_grid.empty()) throw config_error("empty lambda grid");
    if (trials == 0) throw config_error("trials must be positive");
    if (census_radius < 0 || census_radius > 3) throw config_error("census radius must lie in [0, 3]");
    for (double l : lambda_grid)
      if (!(l >= 0)) throw config_error("lambda must be non-negative");
    for (auto n : n_grid)
      if (n < static_cast<std::uint32_t>(d) + 1) throw config_error("n must exceed d");
    if (model == Model::mrsc) {
      if (alpha1 && d != 2) throw config_error("alpha1 parameterization is defined for d = 2 only");
      if (!alpha1 && p_lower.size() != static_cast<std::size_t>(d - 1))
        throw config_error("mrsc needs alpha1 or d-1 lower probabilities");
    }
    for (auto n : n_grid)
      for (double l : lambda_grid) (void)params(n, l);
  }

  /// Generator parameters of one (n, lambda) cell, before coupling.
  GenParams params(std::uint32_t n, double lambda) const {
    if (model == Model::lm) return lm_params(n, d, lambda);
    if (alpha1) return mrsc_alpha_params(n, *alpha1, lambda);
    return mrsc_lambda_params(n, p_lower, lambda);
  }

  /// Lambda at or above the supercritical window of the alpha parameterization.
  bool out_of_theory(double lambda) const {
    return model == Model::mrsc && alpha1 && lambda >= supercritical_bound(*alpha1);
  }
};

struct CellKey {
  std::uint32_t n = 0;
  double lambda = 0;
};

inline std::vector<CellKey> cells(const SweepConfig& cfg) {
  std::vector<CellKey> out;
  for (auto n : cfg.n_grid)
    for (double l : cfg.lambda_grid) out.push_back({n, l});
  return out;
}

/// Cell parameters; in coupled mode every lambda at the same n draws its top
/// layer at the largest p_d of the grid, so the complexes are nested.
inline GenParams cell_params(const SweepConfig& cfg, const CellKey& c) {
  GenParams gp = cfg.params(c.n, c.lambda);
  if (cfg.coupled) {
    double ceil = 0;
    for (double l : cfg.lambda_grid) ceil = std::max(ceil, cfg.params(c.n, l).p.back());
    gp.coupling_ceiling = ceil;
  }
  return gp;
}

// ---------------------------------------------------------------------------
// Execution: trials run on a thread pool, results come back in (cell, trial) order.

struct Outcome {
  std::string error;
  double elapsed_ms = 0;
};

/// Runs fn(cell, trial) for every cell and trial. Once a cell has used up its
/// wall-clock budget, its remaining trials are not run and carry an error.
template <class R>
std::vector<R> run_trials(const SweepConfig& cfg, const std::function<R(const CellKey&, std::uint64_t)>& fn) {
  const auto cs = cells(cfg);
  const std::size_t total = cs.size() * cfg.trials;
  std::vector<R> out(total);
  std::vector<std::atomic<double>> spent(cs.size());
  for (auto& s : spent) s.store(0.0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      const std::size_t ci = i / cfg.trials;
      const std::uint64_t t = i % cfg.trials;
      if (spent[ci].load() > cfg.cell_budget_s * 1000.0) {
        out[i].error = "cell budget exceeded";
        continue;
      }
      const auto start = std::chrono::steady_clock::now();
      try {
        out[i] = fn(cs[ci], t);
      } catch (const resource_error& e) {
        out[i] = R{};
        out[i].error = std::string("resource: ") + e.what();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(total);
        return;
      }
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      out[i].elapsed_ms = ms;
      double cur = spent[ci].load();
      while (!spent[ci].compare_exchange_weak(cur, cur + ms)) {
      }
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(std::max<std::size_t>(total, 1))));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < nt; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ---------------------------------------------------------------------------
// sweep

struct TrialRow : Outcome {
  Model model = Model::lm;
  int d = 2;
  std::uint32_t n = 0;
  double lambda = 0;
  std::optional<double> alpha1;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t s_dm1_total = 0;
  std::uint64_t s_dm1_cmax = 0;
  std::uint64_t s_dm1_c2 = 0;
  std::uint64_t s0_cmax = 0;
  std::uint64_t s0_c2 = 0;
  std::uint64_t n_components = 0;
  std::optional<double> census_tv;
  bool out_of_theory = false;
};

inline TrialRow run_trial(const SweepConfig& cfg, const CellKey& c, std::uint64_t t) {
  const Seed seed{cfg.seed, t};
  TrialRow row;
  row.model = cfg.model;
  row.d = cfg.d;
  row.n = c.n;
  row.lambda = c.lambda;
  row.alpha1 = cfg.model == Model::mrsc ? cfg.alpha1 : std::optional<double>(0.0);
  row.trial = t;
  row.seed = seed.trial_seed();
  row.out_of_theory = cfg.out_of_theory(c.lambda);
  const GenParams gp = cell_params(cfg, c);
  const ComplexD x = sample(gp, seed);
  ComponentOptions opt;
  opt.labels = false;
  opt.s0_top = 2;
  const auto rep = component_map(x, opt);
  row.s_dm1_total = rep.total;
  row.s_dm1_cmax = rep.s_cmax();
  row.s_dm1_c2 = rep.s_c2();
  row.s0_cmax = rep.s0_cmax();
  row.s0_c2 = rep.s0_c2();
  row.n_components = rep.n_components();
  if (cfg.census_radius > 0) {
    const auto cap = cfg.census_cap ? cfg.census_cap : UINT64_MAX;
    const auto cen = census(x, cfg.census_radius, cap, seed);
    if (!cen.empty) row.census_tv = census_tv(cen, BranchingParams{derive_params(gp).lambda, cfg.d});
  }
  return row;
}

inline std::vector<TrialRow> sweep(const SweepConfig& cfg) {
  cfg.validate();
  return run_trials<TrialRow>(cfg, [&](const CellKey& c, std::uint64_t t) { return run_trial(cfg, c, t); });
}

inline Cell opt_cell(const std::optional<double>& v) { return v ? Cell(*v) : Cell(); }
inline Cell count_cell(std::uint64_t v) { return Cell(static_cast<std::int64_t>(v)); }

inline Table sweep_table(const std::vector<TrialRow>& rows, bool timing) {
  Table t;
  t.columns = {"model",    "d",         "n",          "lambda",        "alpha1",      "trial",
               "seed",     "s_dm1_total", "s_dm1_cmax", "s_dm1_c2",    "s0_cmax",     "s0_c2",
               "n_components", "census_tv", "out_of_theory", "error"};
  if (timing) t.columns.push_back("elapsed_ms");
  for (const auto& r : rows) {
    std::vector<Cell> cells{to_string(r.model),        static_cast<std::int64_t>(r.d),
                            count_cell(r.n),           r.lambda,
                            opt_cell(r.alpha1),        count_cell(r.trial),
                            std::to_string(r.seed),    count_cell(r.s_dm1_total),
                            count_cell(r.s_dm1_cmax),  count_cell(r.s_dm1_c2),
                            count_cell(r.s0_cmax),     count_cell(r.s0_c2),
                            count_cell(r.n_components), opt_cell(r.census_tv),
                            r.out_of_theory,           r.error};
    if (timing) cells.emplace_back(r.elapsed_ms);
    t.add(std::move(cells));
  }
  return t;
}

/// Per-cell means with 95% half widths next to the branching-process limits.
inline Table sweep_summary(const SweepConfig& cfg, const std::vector<TrialRow>& rows) {
  Table t;
  t.columns = {"n",          "lambda",          "trials",      "errors",       "cmax_fraction", "cmax_fraction_hw",
               "c2_fraction", "c2_fraction_hw", "s0_fraction", "s0_fraction_hw", "density",     "density_hw",
               "zeta",       "density_theory",  "census_tv",   "census_tv_hw"};
  const auto cs = cells(cfg);
  for (std::size_t ci = 0; ci < cs.size(); ++ci) {
    std::vector<double> fmax, f2, f0, dens, tv;
    std::uint64_t errors = 0;
    for (std::uint64_t k = 0; k < cfg.trials; ++k) {
      const auto& r = rows[ci * cfg.trials + k];
      if (!r.error.empty()) {
        ++errors;
        continue;
      }
      if (r.s_dm1_total > 0) {
        const double tot = static_cast<double>(r.s_dm1_total);
        fmax.push_back(r.s_dm1_cmax / tot);
        f2.push_back(r.s_dm1_c2 / tot);
        dens.push_back(r.n_components / tot);
      }
      f0.push_back(static_cast<double>(r.s0_cmax) / r.n);
      if (r.census_tv) tv.push_back(*r.census_tv);
    }
    const BranchingParams bp{derive_params(cell_params(cfg, cs[ci])).lambda, cfg.d};
    const auto a = stats::mean_ci(fmax), b = stats::mean_ci(f2), c = stats::mean_ci(f0), e = stats::mean_ci(dens);
    const auto v = stats::mean_ci(tv);
    t.add({count_cell(cs[ci].n), cs[ci].lambda, count_cell(cfg.trials), count_cell(errors), a.mean, a.half_width,
           b.mean, b.half_width, c.mean, c.half_width, e.mean, e.half_width, survival_zeta(bp), component_density(bp),
           tv.empty() ? Cell() : Cell(v.mean), tv.empty() ? Cell() : Cell(v.half_width)});
  }
  return t;
}

// ---------------------------------------------------------------------------
// theory

inline Table theory_table(const std::vector<double>& lambdas, int d, double margin = 0.1) {
  Table t;
  t.columns = {"lambda", "gamma", "zeta", "density", "I_lambda", "c", "C"};
  for (double l : lambdas) {
    const BranchingParams bp{l, d};
    Cell c, C, I;
    if (l > 0) I = rate_I(l);
    if (l > 0 && d * l < 1.0) {
      const auto k = subcritical_constants(bp, margin);
      c = k.c;
      C = k.C;
    }
    t.add({l, extinction_gamma(bp), survival_zeta(bp), component_density(bp), I, c, C});
  }
  return t;
}

// ---------------------------------------------------------------------------
// lwc: census against the Poisson-tree law, component density against its limit

inline Table lwc_table(SweepConfig cfg) {
  if (cfg.census_radius == 0) cfg.census_radius = 1;
  const auto rows = sweep(cfg);
  Table t;
  t.columns = {"n", "lambda", "trial", "radius", "census_tv", "density", "density_theory", "error"};
  for (const auto& r : rows) {
    const BranchingParams bp{derive_params(cell_params(cfg, {r.n, r.lambda})).lambda, cfg.d};
    Cell dens;
    if (r.error.empty() && r.s_dm1_total > 0) dens = static_cast<double>(r.n_components) / r.s_dm1_total;
    t.add({count_cell(r.n), r.lambda, count_cell(r.trial), static_cast<std::int64_t>(cfg.census_radius),
           opt_cell(r.census_tv), dens, component_density(bp), r.error});
  }
  return t;
}

// ---------------------------------------------------------------------------
// subcritical: s_{d-1}(C_max) / log n against the bracket [c log n, C log n]

struct SubcriticalRow : Outcome {
  std::uint32_t n = 0;
  double lambda = 0;
  std::uint64_t trial = 0;
  std::uint64_t s_cmax = 0;
};

/// Upper coefficient with I evaluated at d lambda, the mean offspring count.
inline double upper_coefficient_offspring(const BranchingParams& bp, double margin = 0.1) {
  return (1.0 + margin) * bp.d * bp.d / rate_I(bp.d * bp.lambda);
}

inline std::vector<SubcriticalRow> subcritical_rows(const SweepConfig& cfg) {
  for (double l : cfg.lambda_grid)
    if (!(l > 0 && cfg.d * l < 1.0))
      throw config_error("subcritical runs need 0 < lambda < 1/d, got lambda=" + std::to_string(l));
  cfg.validate();
  return run_trials<SubcriticalRow>(cfg, [&](const CellKey& c, std::uint64_t t) {
    const auto x = sample(cell_params(cfg, c), Seed{cfg.seed, t});
    ComponentOptions opt;
    opt.labels = false;
    opt.s0_top = 0;
    SubcriticalRow r;
    r.n = c.n;
    r.lambda = c.lambda;
    r.trial = t;
    r.s_cmax = component_map(x, opt).s_cmax();
    return r;
  });
}

inline Table subcritical_table(const SweepConfig& cfg, const std::vector<SubcriticalRow>& rows, double margin = 0.1) {
  Table t;
  t.columns = {"n", "lambda", "trial", "s_cmax", "log_n", "ratio", "lower", "upper", "inside", "error"};
  for (const auto& r : rows) {
    const auto k = subcritical_constants({r.lambda, cfg.d}, margin);
    const double ln = std::log(static_cast<double>(r.n));
    const double lo = k.c * ln, hi = k.C * ln;
    const double s = static_cast<double>(r.s_cmax);
    t.add({count_cell(r.n), r.lambda, count_cell(r.trial), count_cell(r.s_cmax), ln, s / ln, lo, hi,
           r.error.empty() && s >= lo && s <= hi, r.error});
  }
  return t;
}

/// Per cell: inside rate, mean ratio, and the slope of ratio on log n over
/// all trials at that lambda (a size-independent ratio has slope near 0).
inline Table subcritical_summary(const SweepConfig& cfg, const std::vector<SubcriticalRow>& rows,
                                 double margin = 0.1) {
  Table t;
  t.columns = {"n",        "lambda",   "trials",   "inside_rate", "inside_rate_hw", "ratio",
               "ratio_hw", "c",        "C",        "max_ratio",   "C_offspring",    "inside_rate_offspring",
               "slope",    "slope_lo", "slope_hi"};
  std::map<double, stats::Regression> fits;
  for (double l : cfg.lambda_grid) {
    std::vector<double> xs, ys;
    for (const auto& r : rows)
      if (r.lambda == l && r.error.empty()) {
        xs.push_back(std::log(static_cast<double>(r.n)));
        ys.push_back(r.s_cmax / xs.back());
      }
    try {
      fits[l] = stats::linear_regression(xs, ys);
    } catch (const domain_error&) {
    }
  }
  const auto cs = cells(cfg);
  for (std::size_t ci = 0; ci < cs.size(); ++ci) {
    const BranchingParams bp{cs[ci].lambda, cfg.d};
    const auto k = subcritical_constants(bp, margin);
    const double c_off = upper_coefficient_offspring(bp, margin);
    const double ln = std::log(static_cast<double>(cs[ci].n));
    std::uint64_t ok = 0, inside = 0, inside_off = 0;
    std::vector<double> ratios;
    for (std::uint64_t j = 0; j < cfg.trials; ++j) {
      const auto& r = rows[ci * cfg.trials + j];
      if (!r.error.empty()) continue;
      ++ok;
      const double s = static_cast<double>(r.s_cmax);
      ratios.push_back(s / ln);
      inside += s >= k.c * ln && s <= k.C * ln;
      inside_off += s >= k.c * ln && s <= c_off * ln;
    }
    const auto in = stats::proportion_ci(inside, ok);
    const auto rc = stats::mean_ci(ratios);
    const double mx = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
    Cell sl, slo, shi;
    if (auto it = fits.find(cs[ci].lambda); it != fits.end()) {
      sl = it->second.slope;
      slo = it->second.slope_lo;
      shi = it->second.slope_hi;
    }
    t.add({count_cell(cs[ci].n), cs[ci].lambda, count_cell(ok), in.mean, in.half_width, rc.mean, rc.half_width, k.c,
           k.C, mx, c_off, stats::proportion_ci(inside_off, ok).mean, sl, slo, shi});
  }
  return t;
}

// ---------------------------------------------------------------------------
// vertex: s_0(C_max) / n and optional vertex-discovery curves

struct VertexRow : Outcome {
  std::uint32_t n = 0;
  double lambda = 0;
  std::uint64_t trial = 0;
  std::uint64_t s0_cmax = 0;
  VertexCurve curve;
};

inline std::vector<VertexRow> vertex_rows(const SweepConfig& cfg, const std::vector<double>& curve_grid) {
  if (cfg.model != Model::lm) throw config_error("vertex runs need the lm model");
  cfg.validate();
  return run_trials<VertexRow>(cfg, [&](const CellKey& c, std::uint64_t t) {
    const auto x = sample(cell_params(cfg, c), Seed{cfg.seed, t});
    ComponentOptions opt;
    opt.labels = false;
    opt.s0_top = 1;
    const auto rep = component_map(x, opt);
    VertexRow r;
    r.n = c.n;
    r.lambda = c.lambda;
    r.trial = t;
    r.s0_cmax = rep.s0_cmax();
    if (!curve_grid.empty() && !rep.components.empty()) {
      const Simplex root = x.ridges().at(rep.components[0].min_member);
      r.curve = vertex_growth_curve(x, CofacetIndex(x), root, curve_grid, c.lambda);
    }
    return r;
  });
}

inline Table vertex_table(const std::vector<VertexRow>& rows) {
  Table t;
  t.columns = {"n", "lambda", "trial", "s0_cmax", "fraction", "curve_sup", "curve_truncated", "error"};
  for (const auto& r : rows) {
    Cell sup, trunc;
    if (!r.curve.points.empty()) {
      double s = 0;
      for (const auto& p : r.curve.points) s = std::max(s, std::abs(p.v - p.theory));
      sup = s;
      trunc = r.curve.truncated;
    }
    t.add({count_cell(r.n), r.lambda, count_cell(r.trial), count_cell(r.s0_cmax),
           static_cast<double>(r.s0_cmax) / r.n, sup, trunc, r.error});
  }
  return t;
}

inline Table curve_table(const std::vector<VertexRow>& rows) {
  Table t;
  t.columns = {"n", "lambda", "trial", "t", "v", "theory"};
  for (const auto& r : rows)
    for (const auto& p : r.curve.points) t.add({count_cell(r.n), r.lambda, count_cell(r.trial), p.t, p.v, p.theory});
  return t;
}

// ---------------------------------------------------------------------------
// connect: P(two uniform ridges share a component | both in components of size >= k)

struct ConnectRow : Outcome {
  std::uint32_t n = 0;
  double lambda = 0;
  std::uint64_t trial = 0;
  ConnectivityEstimate est;
};

inline std::vector<ConnectRow> connect_rows(const SweepConfig& cfg, std::uint64_t k, std::uint64_t pairs) {
  cfg.validate();
  return run_trials<ConnectRow>(cfg, [&](const CellKey& c, std::uint64_t t) {
    const Seed seed{cfg.seed, t};
    const auto x = sample(cell_params(cfg, c), seed);
    ConnectRow r;
    r.n = c.n;
    r.lambda = c.lambda;
    r.trial = t;
    if (x.ridges().size() < 2) {
      r.error = "fewer than two ridges";
      return r;
    }
    ComponentOptions opt;
    opt.s0_top = 0;
    r.est = two_source_connectivity(x, component_map(x, opt), k, pairs, seed);
    return r;
  });
}

inline Table connect_table(const SweepConfig& cfg, const std::vector<ConnectRow>& rows, std::uint64_t k) {
  Table t;
  t.columns = {"n", "lambda", "trial", "k", "pairs", "both_large", "same_and_large", "p_both", "ratio",
               "subcritical", "error"};
  for (const auto& r : rows) {
    const bool sub = derive_params(cell_params(cfg, {r.n, r.lambda})).lambda * cfg.d <= 1.0;
    t.add({count_cell(r.n), r.lambda, count_cell(r.trial), count_cell(k), count_cell(r.est.trials),
           count_cell(r.est.both_large), count_cell(r.est.same_and_large), r.est.p_both(),
           r.est.both_large ? Cell(r.est.ratio()) : Cell(), sub, r.error});
  }
  return t;
}

}  // namespace rsc::exp
