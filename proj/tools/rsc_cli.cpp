// rsc: random simplicial complex experiments.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsc/rsc.hpp"

namespace {

using rsc::io::json;

constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw rsc::config_error("not a number: '" + s + "'");
  }
}

// "a,b,c", "start:stop:step" or "start:stop:*factor".
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  if (spec.empty()) return out;
  auto parts = split(spec, ':');
  if (parts.size() == 1) {
    for (const auto& p : split(spec, ',')) out.push_back(to_double(p));
    return out;
  }
  if (parts.size() != 3) throw rsc::config_error("bad grid '" + spec + "'");
  const double a = to_double(parts[0]), b = to_double(parts[1]);
  const bool mult = !parts[2].empty() && parts[2][0] == '*';
  const double step = to_double(mult ? parts[2].substr(1) : parts[2]);
  if (mult ? !(step > 1 && a > 0) : !(step > 0)) throw rsc::config_error("grid '" + spec + "' does not advance");
  for (int i = 0;; ++i) {
    const double v = mult ? a * std::pow(step, i) : a + i * step;
    if (v > b * (1 + 1e-12)) break;
    out.push_back(v);
  }
  return out;
}

std::vector<std::uint32_t> parse_n_grid(const std::string& spec) {
  std::vector<std::uint32_t> out;
  for (double v : parse_grid(spec)) {
    if (!(v >= 1 && v < 4294967296.0) || v != std::floor(v)) throw rsc::config_error("bad n value in '" + spec + "'");
    out.push_back(static_cast<std::uint32_t>(v));
  }
  return out;
}

struct Global {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  unsigned threads = 1;
  std::string config;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw rsc::config_error("cannot write " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void emit(const Global& g, const rsc::io::Table& t) {
  Output o(g.out);
  rsc::io::write_table(o.stream(), t, rsc::io::parse_format(g.format));
}

void emit_to(const std::string& path, const Global& g, const rsc::io::Table& t) {
  if (path.empty()) return;
  Output o(path);
  rsc::io::write_table(o.stream(), t, rsc::io::parse_format(g.format));
}

// Options that describe one complex, either generated or read from a file.
struct ComplexArgs {
  std::string input;
  std::uint32_t n = 100;
  int d = 2;
  std::string model = "lm";
  double lambda = 1.0;
  std::string p;  // explicit p_1,...,p_d
  double alpha1 = -1;
  std::uint64_t trial = 0;

  void add(CLI::App* app, bool with_input) {
    if (with_input) app->add_option("--input", input, "Complex file (JSON Lines of maximal simplices)");
    app->add_option("--n", n, "Number of vertices");
    app->add_option("-d,--d", d, "Top dimension");
    app->add_option("--model", model, "lm or mrsc");
    app->add_option("--lambda", lambda, "Mean cofacet count n*r_d");
    app->add_option("--p", p, "Explicit probabilities p_1,...,p_d (overrides --lambda)");
    app->add_option("--alpha1", alpha1, "mrsc, d=2: p_1 = n^-alpha1");
    app->add_option("--trial", trial, "Trial index for the seed");
  }

  rsc::GenParams params() const {
    const auto m = rsc::parse_model(model);
    if (!p.empty()) {
      rsc::GenParams gp;
      gp.n = n;
      gp.d = d;
      gp.model = m;
      gp.p = parse_grid(p);
      gp.validate();
      return gp;
    }
    if (m == rsc::Model::lm) return rsc::lm_params(n, d, lambda);
    if (alpha1 >= 0) return rsc::mrsc_alpha_params(n, alpha1, lambda);
    throw rsc::config_error("mrsc needs --p or --alpha1");
  }

  rsc::ComplexD load(const Global& g) const {
    if (!input.empty()) return rsc::io::read_complex_file(input);
    return rsc::sample(params(), rsc::Seed{g.seed, trial});
  }

  double lambda_of() const {
    if (!input.empty()) return lambda;
    return rsc::derive_params(params()).lambda;
  }
};

// Options shared by the sweep-style commands.
struct SweepArgs {
  std::string model = "lm";
  int d = 2;
  std::string n_grid = "1000";
  std::string lambda_grid = "1";
  double alpha1 = -1;
  std::string p_lower;
  std::uint64_t trials = 10;
  int radius = 0;
  std::uint64_t census_cap = 0;
  bool coupled = false;
  double budget = 120;
  bool timing = false;
  std::string summary;

  void add(CLI::App* app) {
    app->add_option("--model", model, "lm or mrsc");
    app->add_option("-d,--d", d, "Top dimension");
    app->add_option("--n-grid", n_grid, "n values: a,b,c or start:stop:step or start:stop:*factor");
    app->add_option("--lambda-grid", lambda_grid, "lambda values, same syntax");
    app->add_option("--alpha1", alpha1, "mrsc, d=2: p_1 = n^-alpha1");
    app->add_option("--p-lower", p_lower, "mrsc: fixed p_1,...,p_{d-1}");
    app->add_option("--trials", trials, "Trials per cell");
    app->add_option("--radius", radius, "Census radius (0 = no census)");
    app->add_option("--census-cap", census_cap, "Roots sampled per census (0 = all)");
    app->add_flag("--coupled", coupled, "Nest the complexes of each trial along the lambda grid");
    app->add_option("--cell-budget", budget, "Wall-clock seconds per cell");
    app->add_flag("--timing", timing, "Add elapsed_ms to each row");
    app->add_option("--summary", summary, "Write per-cell summary to this file");
  }

  rsc::exp::SweepConfig config(const Global& g) const {
    rsc::exp::SweepConfig c;
    c.model = rsc::parse_model(model);
    c.d = d;
    c.n_grid = parse_n_grid(n_grid);
    c.lambda_grid = parse_grid(lambda_grid);
    if (alpha1 >= 0) c.alpha1 = alpha1;
    c.p_lower = parse_grid(p_lower);
    c.trials = trials;
    c.seed = g.seed;
    c.census_radius = radius;
    c.census_cap = census_cap;
    c.coupled = coupled;
    c.threads = g.threads;
    c.cell_budget_s = budget;
    c.timing = timing;
    return c;
  }
};

rsc::Simplex parse_simplex(const std::string& s) {
  std::vector<rsc::Vertex> vs;
  for (double v : parse_grid(s)) vs.push_back(static_cast<rsc::Vertex>(v));
  return rsc::Simplex(vs);
}

// Appends "--key value" for every config entry whose flag is absent from the
// command line. Nested objects apply only to the subcommand of that name.
void merge_config(const json& cfg, const std::string& sub, const std::vector<std::string>& given,
                  std::vector<std::string>& args) {
  auto present = [&](const std::string& flag) {
    for (const auto& a : given)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  for (const auto& [key, val] : cfg.items()) {
    if (val.is_object()) {
      if (key == sub) merge_config(val, sub, given, args);
      continue;
    }
    const std::string flag = "--" + key;
    if (key == "config" || present(flag)) continue;
    if (val.is_boolean()) {
      if (val.get<bool>()) args.push_back(flag);
      continue;
    }
    std::string text;
    if (val.is_array()) {
      for (const auto& v : val) text += (text.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
    } else {
      text = val.is_string() ? val.get<std::string>() : val.dump();
    }
    args.push_back(flag);
    args.push_back(text);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Random simplicial complexes: generation, components, local limits and experiments", "rsc_cli"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--format", g.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "JSON config whose keys mirror the long flags");

  ComplexArgs gen_args, comp_args, expl_args, cen_args;
  SweepArgs sweep_args, lwc_args, sub_args, vert_args, conn_args;

  auto* gen = app.add_subcommand("generate", "Sample a complex, write its maximal simplices");
  gen_args.add(gen, false);

  auto* comp = app.add_subcommand("components", "Component report of a complex as JSON");
  comp_args.add(comp, true);
  bool with_labels = false;
  comp->add_flag("--labels", with_labels, "Include the ridge-to-component labels");

  auto* expl = app.add_subcommand("explore", "Exploration trace from a root ridge");
  expl_args.add(expl, true);
  std::string root_spec;
  std::uint64_t step_cap = 0;
  expl->add_option("--root", root_spec, "Root ridge as v0,v1,... (default: first ridge)");
  expl->add_option("--step-cap", step_cap, "Maximum steps (0 = until the component is exhausted)");

  auto* cen = app.add_subcommand("census", "Radius-r neighborhood census");
  cen_args.add(cen, true);
  int cen_radius = 1;
  std::uint64_t cen_cap = 0;
  cen->add_option("--radius", cen_radius, "Ball radius")->check(CLI::Range(1, 3));
  cen->add_option("--census-cap", cen_cap, "Roots sampled (0 = all)");

  auto* theory = app.add_subcommand("theory", "Branching-process constants over a lambda grid");
  std::string th_grid = "0.1,0.3,0.5,1,1.5,2";
  int th_d = 2;
  theory->add_option("--lambda-grid", th_grid, "lambda values");
  theory->add_option("-d,--d", th_d, "Top dimension");

  auto* sw = app.add_subcommand("sweep", "Component sizes over an (n, lambda) grid");
  sweep_args.add(sw);

  auto* lwc = app.add_subcommand("lwc", "Neighborhood census and component density against their limits");
  lwc_args.radius = 1;
  lwc_args.add(lwc);

  auto* sub = app.add_subcommand("subcritical", "Largest component against the log n bracket");
  sub_args.lambda_grid = "0.3";
  sub_args.add(sub);

  auto* vert = app.add_subcommand("vertex", "Vertex fraction of the largest component");
  vert_args.add(vert);
  std::string curve_grid, curves_out;
  vert->add_option("--curve-grid", curve_grid, "t values for vertex-discovery curves");
  vert->add_option("--curves", curves_out, "Write curve points to this file");

  auto* conn = app.add_subcommand("connect", "Two-source connectivity");
  conn_args.add(conn);
  std::uint64_t conn_k = 50, conn_pairs = 10000;
  conn->add_option("--k", conn_k, "Size threshold for a large component");
  conn->add_option("--pairs", conn_pairs, "Ridge pairs per trial");

  // Splice in the config file before parsing so explicit flags win.
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string cfg_path, sub_name;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) cfg_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) cfg_path = args[i].substr(9);
    if (sub_name.empty())
      for (auto* s : app.get_subcommands([](CLI::App*) { return true; }))
        if (s->get_name() == args[i]) sub_name = args[i];
  }
  if (!cfg_path.empty()) {
    auto extra = std::vector<std::string>{};
    merge_config(rsc::io::read_config(cfg_path), sub_name, args, extra);
    args.insert(args.end(), extra.begin(), extra.end());
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*gen) {
    const auto x = rsc::sample(gen_args.params(), rsc::Seed{g.seed, gen_args.trial});
    Output o(g.out);
    rsc::io::write_complex(o.stream(), x);
  } else if (*comp) {
    const auto x = comp_args.load(g);
    const auto rep = rsc::component_map(x);
    auto j = rsc::io::report_json(rep, with_labels);
    j["n"] = x.n();
    j["d"] = x.d();
    j["s_dm1_total"] = rep.total;
    Output o(g.out);
    o.stream() << j.dump() << '\n';
  } else if (*expl) {
    const auto x = expl_args.load(g);
    if (x.ridges().size() == 0) throw rsc::config_error("complex has no (d-1)-simplices");
    const rsc::Simplex root = root_spec.empty() ? x.ridges().at(0) : parse_simplex(root_spec);
    const auto tr = rsc::explore(x, root, step_cap ? step_cap : UINT64_MAX);
    rsc::io::Table t;
    t.columns = {"k", "explored", "F", "B", "H", "forward", "backward", "sibling", "A", "V", "dist"};
    for (const auto& s : tr.steps)
      t.add({static_cast<std::int64_t>(s.k), s.explored.str(), static_cast<std::int64_t>(s.F),
             static_cast<std::int64_t>(s.B), static_cast<std::int64_t>(s.H), static_cast<std::int64_t>(s.forward),
             static_cast<std::int64_t>(s.backward), static_cast<std::int64_t>(s.sibling),
             static_cast<std::int64_t>(s.A), static_cast<std::int64_t>(s.V), static_cast<std::int64_t>(s.dist)});
    emit(g, t);
  } else if (*cen) {
    const auto x = cen_args.load(g);
    const auto c = rsc::census(x, cen_radius, cen_cap ? cen_cap : UINT64_MAX, rsc::Seed{g.seed, cen_args.trial});
    const rsc::BranchingParams bp{cen_args.lambda_of(), x.d()};
    rsc::io::Table t;
    t.columns = {"code_hex", "count", "freq", "tree", "theory"};
    for (const auto& [code, count] : c.counts) {
      auto it = c.trees.find(code);
      rsc::io::Cell th;
      if (it != c.trees.end()) th = rsc::tree_prob(it->second, cen_radius, bp);
      t.add({rsc::to_hex(code), static_cast<std::int64_t>(count), c.freq(code), it != c.trees.end(), th});
    }
    emit(g, t);
  } else if (*theory) {
    emit(g, rsc::exp::theory_table(parse_grid(th_grid), th_d));
  } else if (*sw) {
    const auto cfg = sweep_args.config(g);
    const auto rows = rsc::exp::sweep(cfg);
    emit(g, rsc::exp::sweep_table(rows, cfg.timing));
    emit_to(sweep_args.summary, g, rsc::exp::sweep_summary(cfg, rows));
  } else if (*lwc) {
    emit(g, rsc::exp::lwc_table(lwc_args.config(g)));
  } else if (*sub) {
    const auto cfg = sub_args.config(g);
    const auto rows = rsc::exp::subcritical_rows(cfg);
    emit(g, rsc::exp::subcritical_table(cfg, rows));
    emit_to(sub_args.summary, g, rsc::exp::subcritical_summary(cfg, rows));
  } else if (*vert) {
    const auto cfg = vert_args.config(g);
    const auto rows = rsc::exp::vertex_rows(cfg, parse_grid(curve_grid));
    emit(g, rsc::exp::vertex_table(rows));
    emit_to(curves_out, g, rsc::exp::curve_table(rows));
  } else if (*conn) {
    const auto cfg = conn_args.config(g);
    emit(g, rsc::exp::connect_table(cfg, rsc::exp::connect_rows(cfg, conn_k, conn_pairs), conn_k));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const rsc::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rsc::resource_error& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kExitResource;
  } catch (const rsc::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
