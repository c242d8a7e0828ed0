#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>

#include "csbp/conditioning.hpp"
#include "csbp/decorate.hpp"
#include "csbp/io.hpp"
#include "csbp/metric.hpp"
#include "csbp/samplers.hpp"
#include "csbp/tree.hpp"
#include "csbp/verify.hpp"

using namespace csbp;
using io::Config;
using io::ConfigError;

namespace {

constexpr int kOk = 0, kFail = 1, kInvalid = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
};

void add_common(CLI::App* sc, Common& c) {
  sc->add_option("--config", c.config, "key=value config file with an [experiment] section");
  sc->add_option("--seed", c.seed, "root seed");
  sc->add_option("--out", c.out, "output directory");
  sc->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
}

// Settings after merging flags, config and the OUTPUT_DIR variable.
struct Run {
  Config cfg;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out;
};

Run resolve(const Common& c, const std::set<std::string>& extra_keys) {
  Run r;
  if (!c.config.empty()) r.cfg = Config::load(c.config);
  std::set<std::string> known = {"experiment.seed", "experiment.jobs", "experiment.out"};
  for (const auto& k : extra_keys) known.insert("experiment." + k);
  r.cfg.require_known(known);
  r.seed = c.seed ? *c.seed : r.cfg.get_u64("seed", 1);
  r.jobs = c.jobs ? *c.jobs : static_cast<int>(r.cfg.get_int("jobs", 1));
  if (r.jobs < 1) throw ConfigError("jobs must be positive");
  const char* env = std::getenv("OUTPUT_DIR");
  if (c.out) r.out = *c.out;
  else if (env && *env) r.out = env;
  else r.out = r.cfg.get_string("out", "out");
  io::ensure_dir(r.out);
  return r;
}

ModelParams params_from(const Config& cfg, std::optional<double> theta) {
  ModelParams p{cfg.get_double("beta", 1.0), theta ? *theta : cfg.get_double("theta", 0.0),
                cfg.get_double("alpha", 0.0)};
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return p;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Common& c, const std::string& target, std::optional<std::size_t> samples,
               std::optional<int> n, double scale) {
  Run r = resolve(c, {"samples", "n", "scale"});
  verify::Options o;
  o.seed = r.seed;
  o.jobs = r.jobs;
  o.scale = scale > 0.0 ? scale : r.cfg.get_double("scale", 1.0);
  if (!(o.scale > 0.0)) throw ConfigError("scale must be positive");
  o.samples = samples ? *samples : static_cast<std::size_t>(r.cfg.get_int("samples", 0));
  o.only_n = n ? *n : static_cast<int>(r.cfg.get_int("n", 0));
  std::vector<std::string> suites;
  try {
    suites = verify::expand_target(target);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  bool all_ok = true;
  for (const auto& s : suites) {
    auto t0 = std::chrono::steady_clock::now();
    verify::SuiteReport rep = verify::run_suite(s, o);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    io::write_text(io::join_path(r.out, "verify-" + s + ".json"), rep.dump());
    std::size_t bad = 0;
    for (const auto& ch : rep.checks)
      if (!ch.pass) ++bad;
    std::printf("%s %-15s checks=%zu failed=%zu %.1fs\n", rep.pass() ? "PASS" : "FAIL", s.c_str(),
                rep.checks.size(), bad, secs);
    for (const auto& ch : rep.checks)
      if (!ch.pass) std::printf("  failed: %s %s\n", ch.name.c_str(), ch.data.dump().c_str());
    std::fflush(stdout);
    all_ok = all_ok && rep.pass();
  }
  return all_ok ? kOk : kFail;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Common& c, const std::string& kind, std::optional<double> theta,
                 std::optional<std::size_t> samples_flag) {
  Run r = resolve(c, {"beta", "theta", "alpha", "t", "s", "x", "grid", "dt", "method", "epsilon", "samples"});
  ModelParams p = params_from(r.cfg, theta);
  std::size_t samples = samples_flag ? *samples_flag : static_cast<std::size_t>(r.cfg.get_int("samples", 1000));
  double eps = r.cfg.get_double("epsilon", decorate::kDefaultEpsilon);
  RandomStream root(r.seed);
  std::string path = io::join_path(r.out, "simulate-" + kind + ".csv");
  std::string seed_s = std::to_string(r.seed);
  auto prefix = [&](std::size_t i) {
    return std::vector<std::string>{std::to_string(i), seed_s, io::fmt(p.beta), io::fmt(p.theta), io::fmt(p.alpha)};
  };
  if (kind == "csbp") {
    double x = r.cfg.get_double("x", 1.0);
    std::vector<double> grid = r.cfg.get_list("grid", {0.25, 0.5, 0.75, 1.0});
    io::CsvWriter w(path, {"sample", "seed", "beta", "theta", "alpha", "x", "t", "value"});
    for (std::size_t i = 0; i < samples; ++i) {
      RandomStream rs = root.split(i);
      PathSample ps = samplers::sample_csbp_path(p, x, grid, rs);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        auto row = prefix(i);
        row.push_back(io::fmt(x));
        row.push_back(io::fmt(grid[k]));
        row.push_back(io::fmt(ps.values[k]));
        w.row(row);
      }
    }
  } else if (kind == "zalpha") {
    double t = r.cfg.get_double("t", 1.0);
    std::string method = r.cfg.get_string("method", "exact");
    if (method != "exact" && method != "euler") throw ConfigError("method must be exact or euler");
    double dt = r.cfg.get_double("dt", 1e-3);
    io::CsvWriter w(path, {"sample", "seed", "beta", "theta", "alpha", "t", "method", "value", "jumps"});
    for (std::size_t i = 0; i < samples; ++i) {
      RandomStream rs = root.split(i);
      auto d = method == "exact" ? samplers::sample_Zalpha_exact(p, t, rs) : samplers::sample_Zalpha_euler(p, t, dt, rs);
      auto row = prefix(i);
      row.insert(row.end(), {io::fmt(t), method, io::fmt(d.value), std::to_string(d.jumps)});
      w.row(row);
    }
  } else if (kind == "kesten" || kind == "decorated") {
    double s = r.cfg.get_double("s", 1.0);
    io::CsvWriter w(path, {"sample", "seed", "beta", "theta", "alpha", "s", "Z_s", "decorations"});
    for (std::size_t i = 0; i < samples; ++i) {
      RandomStream rs = root.split(i);
      DecoratedBackbone d = kind == "kesten" ? decorate::sample_kesten(p, s, rs, eps)
                                             : decorate::sample_decorated(p, s, rs, eps);
      auto row = prefix(i);
      row.insert(row.end(), {io::fmt(s), io::fmt(d.local_time(s)), std::to_string(d.decorations.size())});
      w.row(row);
    }
    if (kind == "decorated") {
      // one finite tree with its stubs, for inspection
      RandomStream rs = root.split(samples);
      DecoratedBackbone d = decorate::build_finite_decorated_tree(p, s, eps, rs);
      io::write_text(io::join_path(r.out, "decorated-tree.txt"), tree::to_text(d.tree));
      io::CsvWriter dw(io::join_path(r.out, "decorated-stubs.csv"), {"branch", "h", "survival", "top"});
      for (const auto& rec : d.decorations)
        dw.row({std::to_string(rec.branch), io::fmt(rec.h), io::fmt(rec.survival), io::fmt(std::min(rec.h + rec.survival, s))});
    }
  } else {
    throw ConfigError("unknown simulate kind '" + kind + "'");
  }
  std::printf("wrote %s\n", path.c_str());
  return kOk;
}

// ---------------------------------------------------------------- limits

int cmd_limits(const Common& c, const std::string& regime, std::optional<double> theta) {
  Run r = resolve(c, {"beta", "theta", "alpha", "lambda", "s", "t_grid", "c", "exponent"});
  ModelParams p = params_from(r.cfg, theta);
  double lambda = r.cfg.get_double("lambda", 1.0), s = r.cfg.get_double("s", 1.0);
  bool critical = p.theta == 0.0;
  std::vector<double> grid;
  for (int i = 2; i <= (critical ? 200 : 20); ++i) grid.push_back(i);
  grid = r.cfg.get_list("t_grid", grid);
  double alpha = r.cfg.get_double("alpha", 1.0);
  RegimeSpec spec;
  if (regime == "poisson") {
    spec = critical ? RegimeSpec::power(r.cfg.get_double("c", alpha * p.beta * p.beta), r.cfg.get_double("exponent", 2.0))
                    : RegimeSpec::exponential(r.cfg.get_double("c", alpha),
                                              r.cfg.get_double("exponent", 2.0 * p.beta * std::fabs(p.theta)));
  } else if (regime == "kesten") {
    spec = RegimeSpec::power(r.cfg.get_double("c", 1.0), r.cfg.get_double("exponent", critical ? 0.5 : 1.0));
  } else if (regime == "extinction") {
    spec = RegimeSpec::zero_after(0.0);
  } else {
    throw ConfigError("unknown regime '" + regime + "'");
  }
  RegimeClass rc = conditioning::classify(spec, p);
  if (regime != regime_name(rc.regime))
    throw ConfigError("level " + spec.describe() + " falls in the " + regime_name(rc.regime) + " regime");
  std::vector<ConvergenceRow> rows;
  try {
    rows = conditioning::convergence_experiment(p, spec, lambda, s, grid, r.jobs);
  } catch (const UnsupportedRegime& e) {
    throw ConfigError(e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  std::string base = io::join_path(r.out, "limits-" + regime);
  io::CsvWriter w(base + ".csv", {"t", "a_t", "A_t", "limit", "abs_err", "rel_err"});
  io::Series err{"rel_err", {}, {}}, at{"A_t", {}, {}};
  for (const auto& row : rows) {
    w.row(std::vector<double>{row.t, row.a, row.At, row.limit, row.abs_err, row.rel_err});
    err.x.push_back(row.t);
    err.y.push_back(row.rel_err);
    at.x.push_back(row.t);
    at.y.push_back(row.At);
  }
  io::write_svg(base + ".svg", regime + " regime, theta=" + io::fmt(p.theta), "t", "relative error", {err}, true);
  io::write_svg(base + "-At.svg", regime + " regime, theta=" + io::fmt(p.theta), "t", "A_t", {at}, false);
  std::size_t thr = conditioning::monotone_threshold(rows);
  std::printf("%s: limit=%s final rel_err=%s monotone from t=%s\n", regime.c_str(), io::fmt(rows.back().limit).c_str(),
              io::fmt(rows.back().rel_err).c_str(), io::fmt(rows[thr].t).c_str());
  return kOk;
}

// ---------------------------------------------------------------- trees / gh

PointedTree load_or_random(const std::string& path, int n, RandomStream& rs) {
  if (!path.empty()) {
    try {
      return tree::from_text(io::read_text(path));
    } catch (const TreeError& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  tree::RandomTreeSpec spec;
  spec.n_pointed = n;
  spec.max_vertices = 12;
  return tree::random_tree(spec, rs);
}

int cmd_gh(const Common& c, const std::string& fa, const std::string& fb, std::optional<int> n,
           std::optional<double> delta) {
  Run r = resolve(c, {"n", "delta", "a", "b"});
  int np = n ? *n : static_cast<int>(r.cfg.get_int("n", 2));
  if (np < 0) throw ConfigError("n must be non-negative");
  RandomStream rs(r.seed);
  PointedTree a = load_or_random(fa.empty() ? r.cfg.get_string("a", "") : fa, np, rs);
  PointedTree b = load_or_random(fb.empty() ? r.cfg.get_string("b", "") : fb, a.n_pointed(), rs);
  if (a.n_pointed() != b.n_pointed()) throw ConfigError("trees carry different numbers of pointed vertices");
  nlohmann::ordered_json j;
  j["lower"] = metric::gh_lower(a, b);
  j["upper"] = metric::gh_upper(a, b);
  double d = delta ? *delta : r.cfg.get_double("delta", 0.0);
  if (d > 0.0) {
    try {
      auto e = metric::gh_exact_small(a, b, d);
      j["exact"] = {{"lower", e.lower}, {"upper", e.upper}, {"delta", d}};
    } catch (const MetricError& e) {
      j["exact"] = nullptr;
      j["exact_skipped"] = e.what();
    }
  }
  std::string text = j.dump(2) + "\n";
  io::write_text(io::join_path(r.out, "gh.json"), text);
  std::fputs(text.c_str(), stdout);
  return kOk;
}

int cmd_trees(const Common& c, const std::string& op, const std::string& file, std::optional<int> n) {
  Run r = resolve(c, {"n", "tree"});
  int np = n ? *n : static_cast<int>(r.cfg.get_int("n", 3));
  if (np < 1 || np > 20) throw ConfigError("n must lie in 1..20");
  RandomStream rs(r.seed);
  PointedTree t = load_or_random(file.empty() ? r.cfg.get_string("tree", "") : file, np, rs);
  io::write_text(io::join_path(r.out, "tree-input.txt"), tree::to_text(t));
  if (op == "canon") {
    PointedTree k = tree::canonicalize(t);
    io::write_text(io::join_path(r.out, "tree-canon.txt"), tree::to_text(k));
    std::printf("%s\n", tree::canonical_string(t).c_str());
  } else if (op == "split" || op == "graft") {
    auto comps = tree::split_n(t);
    for (std::size_t a = 0; a < comps.size(); ++a) {
      if (comps[a].size() <= 1) continue;
      io::write_text(io::join_path(r.out, "split-" + std::to_string(a) + ".txt"), tree::to_text(comps[a]));
    }
    if (op == "graft") {
      for (std::size_t a = 1; a < comps.size(); ++a) comps[a] = tree::spine_marked(comps[a]);
      PointedTree g = tree::graft_n(tree::code_L(t), comps);
      if (comps[0].size() > 1) g = tree::vertex_graft(g, 0, comps[0]);
      io::write_text(io::join_path(r.out, "tree-grafted.txt"), tree::to_text(g));
      bool same = tree::equivalent(g, t);
      std::printf("graft(split(T)) %s T\n", same ? "==" : "!=");
      return same ? kOk : kFail;
    }
    std::printf("split into %zu components\n", comps.size());
  } else if (op == "code") {
    BranchCode code = tree::code_L(t);
    io::CsvWriter w(io::join_path(r.out, "tree-code.csv"), {"subset", "length"});
    for (unsigned a = 1; a < code.lengths.size(); ++a)
      if (code.lengths[a] > 0.0) w.row({std::to_string(a), io::fmt(code.lengths[a])});
    DistanceMatrix d = tree::pointed_distances(t);
    std::vector<std::string> hdr{"i"};
    for (int j = 0; j <= d.n; ++j) hdr.push_back("d" + std::to_string(j));
    io::CsvWriter dw(io::join_path(r.out, "tree-distances.csv"), hdr);
    for (int i = 0; i <= d.n; ++i) {
      std::vector<std::string> row{std::to_string(i)};
      for (int j = 0; j <= d.n; ++j) row.push_back(io::fmt(d.at(i, j)));
      dw.row(row);
    }
    bool ok = tree::four_point_check(d, 1e-9).ok;
    std::printf("code entries written; four-point %s\n", ok ? "holds" : "fails");
    return ok ? kOk : kFail;
  } else {
    throw ConfigError("unknown trees op '" + op + "'");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"csbp: branching process sampling, conditioning limits and tree tools"};
  app.require_subcommand(1);
  Common common;

  std::string target;
  std::optional<std::size_t> samples;
  std::optional<int> n;
  std::optional<double> theta, delta;
  double scale = 0.0;
  auto* v = app.add_subcommand("verify", "run a verification target");
  add_common(v, common);
  v->add_option("target", target, "suite, module or 'all'")->required()->check(CLI::IsMember(verify::target_names()));
  v->add_option("--samples", samples, "per-side Monte Carlo samples");
  v->add_option("--n", n, "restrict n-indexed suites to one n");
  v->add_option("--scale", scale, "multiply sample and instance counts");

  std::string kind;
  auto* sim = app.add_subcommand("simulate", "draw samples to CSV");
  add_common(sim, common);
  sim->add_option("kind", kind)->required()->check(CLI::IsMember({"csbp", "zalpha", "kesten", "decorated"}));
  sim->add_option("--theta", theta);
  sim->add_option("--samples", samples);

  std::string regime;
  auto* lim = app.add_subcommand("limits", "conditional Laplace functional against its limit");
  add_common(lim, common);
  lim->add_option("regime", regime)->required()->check(CLI::IsMember({"poisson", "kesten", "extinction"}));
  lim->add_option("--theta", theta);

  std::string fa, fb;
  auto* gh = app.add_subcommand("gh", "distance bounds between two pointed trees");
  add_common(gh, common);
  gh->add_option("--a", fa, "first tree file (random when absent)");
  gh->add_option("--b", fb, "second tree file (random when absent)");
  gh->add_option("--n", n, "pointed vertices of random trees");
  gh->add_option("--delta", delta, "resolution of the exact small-tree computation");

  std::string op, file;
  auto* tr = app.add_subcommand("trees", "tree algebra on one tree");
  add_common(tr, common);
  tr->add_option("op", op)->required()->check(CLI::IsMember({"canon", "split", "graft", "code"}));
  tr->add_option("--tree", file, "tree file (random when absent)");
  tr->add_option("--n", n, "pointed vertices of a random tree");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*v) return cmd_verify(common, target, samples, n, scale);
    if (*sim) return cmd_simulate(common, kind, theta, samples);
    if (*lim) return cmd_limits(common, regime, theta);
    if (*gh) return cmd_gh(common, fa, fb, n, delta);
    if (*tr) return cmd_trees(common, op, file, n);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFail;
  }
  return kInvalid;
}
