#include "csbp/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace csbp::metric {

namespace {

void check_arity(const PointedTree& a, const PointedTree& b) {
  if (a.n_pointed() != b.n_pointed()) throw MetricError("pointed trees of different arity");
}

PointedTree unmarked(const PointedTree& t) {
  PointedTree c = t;
  for (int v = 0; v < c.size(); ++v) c.set_marked(v, false);
  c.set_unbounded_spine(false);
  return c;
}

double diameter(const PointedTree& t) {
  double d = 0.0;
  for (int v : t.leaves_planar())
    for (int w : t.leaves_planar()) d = std::max(d, t.distance(v, w));
  for (int v : t.leaves_planar()) d = std::max(d, t.height(v));
  return d;
}

// Point of t at fraction u along [w, v] where w is an ancestor of v.
TreePoint point_on_path(const PointedTree& t, int w, int v, double u) {
  double h = t.height(w) + u * (t.height(v) - t.height(w));
  if (u <= 0.0) return {w, t.height(w)};
  if (u >= 1.0) return {v, t.height(v)};
  int x = v;
  while (x != w && t.height(t.parent(x)) >= h) x = t.parent(x);
  return {x, h};
}

struct Side {
  const PointedTree& t;
  std::vector<unsigned> masks;
  std::vector<MrcaEntry> tab;
};

using PairList = std::vector<std::pair<TreePoint, TreePoint>>;

// Pairs (x, phi(x)) generated from the structure of `s` mapped into `o`.
void generate(const Side& s, const Side& o, PairList& out, double& floor) {
  const PointedTree& t = s.t;
  int n = t.n_pointed();
  auto branch_image = [&](unsigned a, double u) -> TreePoint {
    const MrcaEntry& e = o.tab[a];
    if (e.ell > 0.0) return point_on_path(o.t, e.w, e.v, u);
    return {e.v, o.t.height(e.v)};
  };
  auto image = [&](int p) -> TreePoint {
    if (p == 0 || n == 0) return {0, 0.0};
    unsigned a = s.masks[p];
    const MrcaEntry& e = s.tab[a];
    double u = (t.height(p) - t.height(e.w)) / e.ell;
    return branch_image(a, u);
  };
  if (n > 0) {
    for (unsigned a = 1; a < s.tab.size(); ++a) {
      const MrcaEntry& e = s.tab[a];
      if (!(e.ell > 0.0)) continue;
      out.emplace_back(TreePoint{e.w, t.height(e.w)}, branch_image(a, 0.0));
      out.emplace_back(TreePoint{e.v, t.height(e.v)}, branch_image(a, 1.0));
    }
  }
  for (int p = 0; p < t.size(); ++p) {
    bool on = p == 0 || s.masks[p] != 0u;
    if (!on) continue;
    TreePoint ip = image(p);
    out.emplace_back(TreePoint{p, t.height(p)}, ip);
    // bushes hanging at p
    std::vector<int> bush{p};
    for (int c : t.children(p)) {
      if (s.masks[c] != 0u) continue;
      std::vector<int> st{c};
      while (!st.empty()) {
        int x = st.back();
        st.pop_back();
        bush.push_back(x);
        for (int y : t.children(x)) st.push_back(y);
      }
    }
    if (bush.size() == 1) continue;
    int deep = p;
    for (int x : bush)
      if (t.height(x) > t.height(deep)) deep = x;
    out.emplace_back(TreePoint{deep, t.height(deep)}, ip);
    for (int x : bush)
      for (int y : bush) floor = std::max(floor, t.distance(x, y));
  }
}

double structured_distortion(const PointedTree& a, const PointedTree& b) {
  int n = a.n_pointed();
  Side sa{a, tree::subtree_masks(a), {}};
  Side sb{b, tree::subtree_masks(b), {}};
  if (n > 0) {
    sa.tab = tree::mrca_table(a);
    sb.tab = tree::mrca_table(b);
  }
  PairList pairs, rev;
  double floor = 0.0;
  generate(sa, sb, pairs, floor);
  generate(sb, sa, rev, floor);
  for (auto& [x, y] : rev) pairs.emplace_back(y, x);
  for (int i = 0; i <= n; ++i)
    pairs.emplace_back(TreePoint{a.pointed(i), a.height(a.pointed(i))},
                       TreePoint{b.pointed(i), b.height(b.pointed(i))});
  double dis = floor;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      double d1 = point_distance(a, pairs[i].first, pairs[j].first);
      double d2 = point_distance(b, pairs[i].second, pairs[j].second);
      dis = std::max(dis, std::fabs(d1 - d2));
    }
  return dis;
}

// Distances between the vertices of t refined into pieces of length <= step;
// root first, then the pointed vertices, then the rest.
std::vector<std::vector<double>> refined_distances(const PointedTree& t, double step, int cap) {
  PointedTree r = t;
  int orig = t.size();
  for (int v = 1; v < orig; ++v) {
    int k = static_cast<int>(std::ceil(t.length(v) / step - 1e-9));
    double top = t.height(v), bot = t.height(t.parent(v));
    // bottom up, so each cut falls on the edge still above v
    for (int j = 1; j < k; ++j) r.subdivide(v, bot + (top - bot) * j / k);
    if (r.size() > cap) throw MetricError("refined tree exceeds the vertex cap");
  }
  std::vector<int> order(r.pointed().begin(), r.pointed().end());
  std::vector<char> used(r.size(), 0);
  for (int v : order) used[v] = 1;
  for (int v = 0; v < r.size(); ++v)
    if (!used[v]) order.push_back(v);
  std::vector<std::vector<double>> d(order.size(), std::vector<double>(order.size()));
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = 0; j < order.size(); ++j) d[i][j] = r.distance(order[i], order[j]);
  return d;
}

class CorrespondenceSearch {
 public:
  CorrespondenceSearch(const std::vector<std::vector<double>>& da, const std::vector<std::vector<double>>& db,
                       int n)
      : da_(da), db_(db), n_(n) {}

  bool feasible(double D) {
    D_ = D;
    std::vector<std::pair<int, int>> fixed;
    for (int i = 0; i <= n_; ++i) fixed.emplace_back(i, i);
    for (auto& p : fixed)
      for (auto& q : fixed)
        if (!ok(p, q)) return false;
    // variables: unforced points on each side
    std::vector<Var> vars;
    int pa = static_cast<int>(da_.size()), pb = static_cast<int>(db_.size());
    for (int x = n_ + 1; x < pa; ++x) vars.push_back({true, x, all(pb)});
    for (int y = n_ + 1; y < pb; ++y) vars.push_back({false, y, all(pa)});
    for (auto& v : vars) filter(v, fixed);
    return solve(vars, fixed);
  }

 private:
  struct Var {
    bool left;
    int idx;
    std::vector<int> dom;
  };

  static std::vector<int> all(int k) {
    std::vector<int> v(k);
    for (int i = 0; i < k; ++i) v[i] = i;
    return v;
  }

  bool ok(const std::pair<int, int>& p, const std::pair<int, int>& q) const {
    return std::fabs(da_[p.first][q.first] - db_[p.second][q.second]) <= D_;
  }

  std::pair<int, int> as_pair(const Var& v, int val) const {
    return v.left ? std::make_pair(v.idx, val) : std::make_pair(val, v.idx);
  }

  void filter(Var& v, const std::vector<std::pair<int, int>>& pairs) const {
    std::vector<int> keep;
    for (int val : v.dom) {
      auto p = as_pair(v, val);
      bool good = true;
      for (auto& q : pairs)
        if (!ok(p, q)) {
          good = false;
          break;
        }
      if (good) keep.push_back(val);
    }
    v.dom.swap(keep);
  }

  bool solve(std::vector<Var> vars, std::vector<std::pair<int, int>>& pairs) {
    if (vars.empty()) return true;
    std::size_t best = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i].dom.empty()) return false;
      if (vars[i].dom.size() < vars[best].dom.size()) best = i;
    }
    Var v = vars[best];
    vars.erase(vars.begin() + static_cast<long>(best));
    for (int val : v.dom) {
      auto p = as_pair(v, val);
      std::vector<Var> next = vars;
      bool dead = false;
      for (auto& w : next) {
        filter(w, {p});
        if (w.dom.empty()) {
          dead = true;
          break;
        }
      }
      if (dead) continue;
      pairs.push_back(p);
      if (solve(std::move(next), pairs)) return true;
      pairs.pop_back();
    }
    return false;
  }

  const std::vector<std::vector<double>>& da_;
  const std::vector<std::vector<double>>& db_;
  int n_;
  double D_ = 0.0;
};

}  // namespace

double gh_lower(const PointedTree& a, const PointedTree& b) {
  check_arity(a, b);
  double m = 0.0;
  for (int i = 0; i <= a.n_pointed(); ++i)
    for (int j = i + 1; j <= a.n_pointed(); ++j)
      m = std::max(m, std::fabs(a.distance(a.pointed(i), a.pointed(j)) -
                                b.distance(b.pointed(i), b.pointed(j))));
  return 0.5 * m;
}

double gh_upper(const PointedTree& a, const PointedTree& b) {
  check_arity(a, b);
  if (tree::equivalent(unmarked(a), unmarked(b), 1e-12)) return 0.0;
  double crude = std::max(diameter(a), diameter(b));
  return 0.5 * std::min(crude, structured_distortion(a, b));
}

double gh_finite(const std::vector<std::vector<double>>& da, const std::vector<std::vector<double>>& db,
                 int n_pointed) {
  std::vector<double> cand{0.0};
  for (std::size_t i = 0; i < da.size(); ++i)
    for (std::size_t j = i; j < da.size(); ++j)
      for (std::size_t k = 0; k < db.size(); ++k)
        for (std::size_t l = k; l < db.size(); ++l) cand.push_back(std::fabs(da[i][j] - db[k][l]));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  CorrespondenceSearch cs(da, db, n_pointed);
  std::size_t lo = 0, hi = cand.size() - 1;
  const double slack = 1e-12;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (cs.feasible(cand[mid] + slack)) hi = mid;
    else lo = mid + 1;
  }
  return 0.5 * cand[lo];
}

DistanceBound gh_exact_small(const PointedTree& a, const PointedTree& b, double delta, int max_vertices) {
  check_arity(a, b);
  if (!(delta > 0.0)) throw MetricError("resolution must be positive");
  auto da = refined_distances(a, 0.5 * delta, max_vertices);
  auto db = refined_distances(b, 0.5 * delta, max_vertices);
  double d = gh_finite(da, db, a.n_pointed());
  // each refined vertex set is a delta/4-net of its tree
  return {std::max(0.0, d - 0.5 * delta), d + 0.5 * delta};
}

DistanceBound lgh_numeric(const PointedTree& a, const PointedTree& b, const LghSpec& spec) {
  check_arity(a, b);
  double hmax = std::max(a.max_height(), b.max_height());
  DistanceBound out;
  int k = std::max(1, spec.panels);
  for (int i = 0; i < k && hmax > 0.0; ++i) {
    double t0 = hmax * i / k, t1 = hmax * (i + 1) / k;
    double tm = 0.5 * (t0 + t1);
    PointedTree ra = tree::truncate(a, tm), rb = tree::truncate(b, tm);
    double w = std::exp(-t0) - std::exp(-t1);
    out.lower += w * std::min(1.0, gh_lower(ra, rb));
    out.upper += w * std::min(1.0, gh_upper(ra, rb));
  }
  // beyond the joint height the truncations are the trees themselves
  double tail = std::exp(-hmax);
  out.lower += tail * std::min(1.0, gh_lower(a, b));
  out.upper += tail * std::min(1.0, gh_upper(a, b));
  return out;
}

}  // namespace csbp::metric
