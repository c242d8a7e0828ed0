#include <algorithm>
#include <cmath>
#include <map>

#include "csbp/metric.hpp"
#include "csbp/tree.hpp"
#include "verify_detail.hpp"

namespace csbp::verify::detail {

namespace {

constexpr double kTreeTol = 1e-9;

// One flag per property; the first exception message is kept.
struct Flags {
  std::map<std::string, bool> ok;
  std::string error;
};

class Tally {
 public:
  explicit Tally(std::vector<std::string> names) : names_(std::move(names)), fail_(names_.size(), 0) {}
  void add(const Flags& f) {
    ++total_;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      auto it = f.ok.find(names_[i]);
      if (it == f.ok.end() || !it->second) ++fail_[i];
    }
    if (!f.error.empty() && first_error_.empty()) first_error_ = f.error;
  }
  void emit(SuiteReport& rep) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      json extra = json::object();
      if (fail_[i] && !first_error_.empty()) extra["first_error"] = first_error_;
      rep.checks.push_back(count_check(names_[i], fail_[i], total_, extra));
    }
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::size_t> fail_;
  std::size_t total_ = 0;
  std::string first_error_;
};

template <class F>
Flags guarded(F f) {
  Flags fl;
  try {
    f(fl);
  } catch (const std::exception& e) {
    fl.error = e.what();
  }
  return fl;
}

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b)); }

bool same_matrix(const DistanceMatrix& a, const DistanceMatrix& b) {
  if (a.n != b.n) return false;
  for (std::size_t i = 0; i < a.d.size(); ++i)
    if (!close(a.d[i], b.d[i], kTreeTol)) return false;
  return true;
}

bool same_code(const BranchCode& a, const BranchCode& b) {
  if (a.n != b.n || a.lengths.size() != b.lengths.size()) return false;
  for (std::size_t i = 1; i < a.lengths.size(); ++i)
    if (!close(a.lengths[i], b.lengths[i], kTreeTol)) return false;
  return true;
}

PointedTree split_graft(const PointedTree& t) {
  auto comps = tree::split_n(t);
  for (std::size_t a = 1; a < comps.size(); ++a) comps[a] = tree::spine_marked(comps[a]);
  PointedTree g = tree::graft_n(tree::code_L(t), comps);
  if (comps[0].size() > 1) g = tree::vertex_graft(g, 0, comps[0]);
  return g;
}

bool same_atoms(std::vector<MeasureAtom> a, std::vector<MeasureAtom> b) {
  if (a.size() != b.size()) return false;
  auto key = [](const MeasureAtom& m) { return std::make_pair(m.h, tree::canonical_string(m.tree, 9)); };
  auto by = [&](const MeasureAtom& x, const MeasureAtom& y) { return key(x) < key(y); };
  std::sort(a.begin(), a.end(), by);
  std::sort(b.begin(), b.end(), by);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!close(a[i].h, b[i].h, kTreeTol) || !tree::equivalent(a[i].tree, b[i].tree, kTreeTol)) return false;
  return true;
}

}  // namespace

SuiteReport suite_trees(const Options& o) {
  SuiteReport rep;
  std::size_t N = scaled(1000, o, 10);
  std::uint64_t seed = sub_seed(o.seed, "trees");
  Tally tally({"graft_split_identity", "code_D_of_code_L", "matrix_L_of_D", "four_point", "realize_code_is_span",
               "measure_round_trip", "tree_round_trip", "truncation_composition", "truncation2_composition"});
  std::vector<Flags> out(N);
  RandomStream root(seed);
  stats::parallel_for(N, o.jobs, [&](std::size_t i) {
    out[i] = guarded([&](Flags& f) {
      RandomStream rs = root.split(i);
      tree::RandomTreeSpec spec;
      spec.n_pointed = 1 + static_cast<int>(i % 5);
      spec.max_vertices = 40;
      spec.p_inner_pointed = 0.1;
      PointedTree t = tree::random_tree(spec, rs);
      f.ok["graft_split_identity"] = tree::equivalent(split_graft(t), t, kTreeTol);
      BranchCode code = tree::code_L(t);
      DistanceMatrix d = tree::pointed_distances(t);
      f.ok["code_D_of_code_L"] = same_matrix(tree::code_D(code), d);
      f.ok["matrix_L_of_D"] = same_code(tree::matrix_L(d), code);
      f.ok["four_point"] = tree::four_point_check(d, kTreeTol).ok;
      f.ok["realize_code_is_span"] = tree::equivalent(tree::realize_code(code), tree::span(t), kTreeTol);

      const double L = 2.0;
      int k = static_cast<int>(rs.below(11));
      auto atoms = tree::random_atoms(k, L, 8, rs);
      PointedTree m = tree::tree_from_measure(atoms, L);
      auto back = tree::measure_from_tree(m);
      f.ok["measure_round_trip"] = same_atoms(atoms, back);
      f.ok["tree_round_trip"] = tree::equivalent(tree::tree_from_measure(back, L), m, kTreeTol);

      double h = t.max_height();
      double a = rs.uniform() * h, b = rs.uniform() * h;
      f.ok["truncation_composition"] =
          tree::equivalent(tree::truncate(tree::truncate(t, a), b), tree::truncate(t, std::min(a, b)), kTreeTol);
      double a2 = rs.uniform() * L, b2 = rs.uniform() * L;
      f.ok["truncation2_composition"] =
          tree::equivalent(tree::truncate2_plus(tree::truncate2_plus(m, a2), b2),
                           tree::truncate2_plus(m, std::min(a2, b2)), kTreeTol);
    });
  });
  for (const auto& f : out) tally.add(f);
  tally.emit(rep);
  for (auto& c : rep.checks) c.data["seed"] = seed;
  return rep;
}

namespace {

// Same shape, lengths jittered by up to amp; sometimes one extra bush.
PointedTree perturb(const PointedTree& t, double amp, RandomStream& rs) {
  PointedTree out;
  out.set_marked(0, t.marked(0));
  std::vector<int> map(t.size(), 0);
  for (int v : t.preorder()) {
    if (v == 0) continue;
    double len = t.length(v) * (1.0 + amp * (2.0 * rs.uniform() - 1.0));
    map[v] = out.add_child(map[t.parent(v)], len, t.marked(v));
  }
  std::vector<int> pv;
  for (int v : t.pointed()) pv.push_back(map[v]);
  out.set_pointed(pv);
  if (rs.uniform() < 0.5) {
    int x = static_cast<int>(rs.below(static_cast<std::uint64_t>(out.size())));
    out.add_child(x, 0.05 + 0.45 * rs.uniform());
  }
  return out;
}

tree::RandomTreeSpec small_spec(int n, int maxv, double lo, double hi, bool root_branching) {
  tree::RandomTreeSpec s;
  s.n_pointed = n;
  s.max_vertices = maxv;
  s.min_len = lo;
  s.max_len = hi;
  s.root_branching = root_branching;
  return s;
}

constexpr double kMetricTol = 1e-9;

}  // namespace

SuiteReport suite_metric(const Options& o) {
  SuiteReport rep;
  std::size_t N = scaled(1000, o, 10);
  std::size_t Nsmall = scaled(100, o, 5);
  std::uint64_t seed = sub_seed(o.seed, "metric");
  RandomStream root(seed);
  Tally tally({"lower_symmetric", "lower_identity", "upper_identity", "lower_triangle", "lower_le_upper",
               "span_4_lipschitz", "truncation_bound", "graft_subadditive", "lgh_bound"});
  std::vector<Flags> out(N);
  stats::parallel_for(N, o.jobs, [&](std::size_t i) {
    out[i] = guarded([&](Flags& f) {
      RandomStream rs = root.split(i);
      int n = 1 + static_cast<int>(i % 3);
      PointedTree a = tree::random_tree(small_spec(n, 12, 0.05, 1.0, i % 2 == 0), rs);
      PointedTree b = perturb(a, 0.3, rs);
      PointedTree c = perturb(a, 0.3, rs);
      double lab = metric::gh_lower(a, b), ub = metric::gh_upper(a, b);
      f.ok["lower_symmetric"] = lab == metric::gh_lower(b, a);
      f.ok["lower_identity"] = metric::gh_lower(a, a) == 0.0;
      f.ok["upper_identity"] = metric::gh_upper(a, a) == 0.0;
      f.ok["lower_triangle"] = metric::gh_lower(a, c) <= lab + metric::gh_lower(b, c) + kMetricTol;
      f.ok["lower_le_upper"] = lab <= ub + kMetricTol;
      f.ok["span_4_lipschitz"] = metric::gh_lower(tree::span(a), tree::span(b)) <= 4.0 * ub + kMetricTol;
      double h = std::max(a.max_height(), b.max_height());
      double r = rs.uniform() * h, s = 0.5 * rs.uniform();
      f.ok["truncation_bound"] =
          metric::gh_lower(tree::truncate(a, r), tree::truncate(b, r + s)) <= 4.0 * ub + s + kMetricTol;
      PointedTree g = tree::random_tree(small_spec(1 + static_cast<int>(rs.below(2)), 8, 0.05, 1.0, false), rs);
      PointedTree g2 = perturb(g, 0.3, rs);
      int at = static_cast<int>(rs.below(static_cast<std::uint64_t>(n + 1)));
      f.ok["graft_subadditive"] =
          metric::gh_lower(tree::vertex_graft(a, at, g), tree::vertex_graft(b, at, g2)) <=
          ub + metric::gh_upper(g, g2) + kMetricTol;
      if (i < Nsmall) {
        auto l = metric::lgh_numeric(a, b);
        f.ok["lgh_bound"] = l.lower <= std::min(1.0, 4.0 * ub) + kMetricTol && l.upper <= 1.0 + kMetricTol;
      } else {
        f.ok["lgh_bound"] = true;
      }
    });
  });
  for (const auto& f : out) tally.add(f);
  tally.emit(rep);

  // exact distance between refined vertex sets, two resolutions
  struct Family {
    std::string name;
    double delta, lo, hi;
  };
  for (const Family& fam : {Family{"exact_delta_1e-3", 1e-3, 2e-4, 1.4e-3}, Family{"exact_delta_0.5", 0.5, 0.1, 0.7}}) {
    Tally ex({fam.name + "_inside_bounds", fam.name + "_gap"});
    std::vector<Flags> res(Nsmall);
    RandomStream froot = root.split(1000000 + static_cast<std::uint64_t>(fam.delta * 1e6));
    stats::parallel_for(Nsmall, o.jobs, [&](std::size_t i) {
      res[i] = guarded([&](Flags& f) {
        RandomStream rs = froot.split(i);
        int n = 1 + static_cast<int>(i % 2);
        PointedTree a = tree::random_tree(small_spec(n, 4, fam.lo, fam.hi, false), rs);
        PointedTree b = tree::random_tree(small_spec(n, 4, fam.lo, fam.hi, false), rs);
        auto e = metric::gh_exact_small(a, b, fam.delta);
        double lo = metric::gh_lower(a, b), up = metric::gh_upper(a, b);
        f.ok[fam.name + "_inside_bounds"] = e.lower <= up + kMetricTol && e.upper >= lo - kMetricTol;
        f.ok[fam.name + "_gap"] = e.upper - e.lower <= fam.delta + kMetricTol;
      });
    });
    for (const auto& f : res) ex.add(f);
    ex.emit(rep);
  }
  for (auto& c : rep.checks) c.data["seed"] = seed;
  return rep;
}

}  // namespace csbp::verify::detail
