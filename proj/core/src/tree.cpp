#include "csbp/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace csbp {

PointedTree::PointedTree()
    : parent_{-1}, len_{0.0}, height_{0.0}, children_(1), marked_{0}, pointed_{0} {}

PointedTree PointedTree::segment(double len, bool marked) {
  PointedTree t;
  t.set_marked(0, marked);
  int v = t.add_child(0, len, marked);
  t.push_pointed(v);
  return t;
}

bool PointedTree::has_marks() const {
  return std::any_of(marked_.begin(), marked_.end(), [](char c) { return c != 0; });
}

int PointedTree::add_child(int parent, double len, bool marked, int pos) {
  if (len < 0.0 || !std::isfinite(len)) throw TreeError("edge length must be finite and non-negative");
  if (len == 0.0) return parent;
  int id = size();
  parent_.push_back(parent);
  len_.push_back(len);
  height_.push_back(height_[parent] + len);
  children_.emplace_back();
  marked_.push_back(marked ? 1 : 0);
  auto& ch = children_[parent];
  if (pos < 0 || pos >= static_cast<int>(ch.size())) ch.push_back(id);
  else ch.insert(ch.begin() + pos, id);
  return id;
}

int PointedTree::subdivide(int v, double h) {
  if (v == 0 || h >= height_[v]) return v;
  int p = parent_[v];
  if (h <= height_[p]) return p;
  int id = size();
  parent_.push_back(p);
  len_.push_back(h - height_[p]);
  height_.push_back(h);
  children_.push_back({v});
  marked_.push_back(marked_[v]);
  auto& ch = children_[p];
  *std::find(ch.begin(), ch.end(), v) = id;
  parent_[v] = id;
  len_[v] = height_[v] - h;
  return id;
}

void PointedTree::set_pointed(std::vector<int> v) {
  if (v.empty() || v[0] != 0) throw TreeError("pointed list must start with the root");
  pointed_ = std::move(v);
}

bool PointedTree::is_ancestor(int a, int b) const {
  while (b != -1) {
    if (b == a) return true;
    if (height_[b] < height_[a]) return false;
    b = parent_[b];
  }
  return false;
}

int PointedTree::lca(int a, int b) const {
  while (a != b) {
    if (height_[a] > height_[b]) a = parent_[a];
    else if (height_[b] > height_[a]) b = parent_[b];
    else {
      a = parent_[a];
      b = parent_[b];
    }
  }
  return a;
}

double PointedTree::distance(int a, int b) const {
  int m = lca(a, b);
  return (height_[a] - height_[m]) + (height_[b] - height_[m]);
}

double PointedTree::total_length() const {
  double s = 0.0;
  for (std::size_t i = 1; i < len_.size(); ++i) s += len_[i];
  return s;
}

double PointedTree::max_height() const { return *std::max_element(height_.begin(), height_.end()); }

std::vector<int> PointedTree::path_from_root(int v) const {
  std::vector<int> p;
  for (; v != -1; v = parent_[v]) p.push_back(v);
  std::reverse(p.begin(), p.end());
  return p;
}

std::vector<int> PointedTree::preorder() const {
  std::vector<int> out, st{0};
  out.reserve(parent_.size());
  while (!st.empty()) {
    int v = st.back();
    st.pop_back();
    out.push_back(v);
    const auto& ch = children_[v];
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) st.push_back(*it);
  }
  return out;
}

std::vector<int> PointedTree::leaves_planar() const {
  std::vector<int> out;
  for (int v : preorder())
    if (children_[v].empty()) out.push_back(v);
  return out;
}

double point_distance(const PointedTree& t, const TreePoint& a, const TreePoint& b) {
  int m = t.lca(a.v, b.v);
  if (a.v == b.v) return std::fabs(a.h - b.h);
  if (m == a.v) return b.h - a.h;
  if (m == b.v) return a.h - b.h;
  return (a.h - t.height(m)) + (b.h - t.height(m));
}

namespace tree {

namespace {

// Copies the subtree of src rooted at s below dst vertex d (s itself identified with d).
void copy_below(const PointedTree& src, int s, PointedTree& dst, int d, std::vector<int>* map = nullptr,
                bool keep_marks = true) {
  std::vector<std::pair<int, int>> st{{s, d}};
  while (!st.empty()) {
    auto [a, b] = st.back();
    st.pop_back();
    if (map) (*map)[a] = b;
    const auto& ch = src.children(a);
    std::vector<std::pair<int, int>> next;
    for (int c : ch) {
      int nc = dst.add_child(b, src.length(c), keep_marks && src.marked(c));
      next.emplace_back(c, nc);
    }
    for (auto it = next.rbegin(); it != next.rend(); ++it) st.push_back(*it);
  }
}

// Copy of the vertices with keep[v] (a set closed under parent), in planar order.
PointedTree restrict_to(const PointedTree& t, const std::vector<char>& keep, std::vector<int>& map) {
  PointedTree out;
  map.assign(t.size(), -1);
  map[0] = 0;
  out.set_marked(0, t.marked(0));
  for (int v : t.preorder()) {
    if (v == 0 || !keep[v]) continue;
    map[v] = out.add_child(map[t.parent(v)], t.length(v), t.marked(v));
  }
  return out;
}

std::vector<char> span_flags(const PointedTree& t) {
  std::vector<char> on(t.size(), 0);
  on[0] = 1;
  for (int v : t.pointed())
    for (; v != -1 && !on[v]; v = t.parent(v)) on[v] = 1;
  return on;
}

std::vector<char> core_flags(const PointedTree& t) {
  if (t.has_marks()) {
    std::vector<char> on(t.size(), 0);
    for (int v = 0; v < t.size(); ++v) on[v] = t.marked(v) ? 1 : 0;
    on[0] = 1;
    return on;
  }
  return span_flags(t);
}

int popcount(unsigned x) { return __builtin_popcount(x); }

}  // namespace

PointedTree span(const PointedTree& t) {
  std::vector<int> map;
  PointedTree out = restrict_to(t, span_flags(t), map);
  std::vector<int> pv;
  for (int v : t.pointed()) pv.push_back(map[v]);
  out.set_pointed(pv);
  return out;
}

TreePoint project(const PointedTree& t, int y) {
  auto on = span_flags(t);
  while (!on[y]) y = t.parent(y);
  return {y, t.height(y)};
}

std::vector<unsigned> subtree_masks(const PointedTree& t) {
  std::vector<unsigned> m(t.size(), 0u);
  for (int i = 1; i <= t.n_pointed(); ++i)
    for (int v = t.pointed(i); v != -1; v = t.parent(v)) m[v] |= 1u << (i - 1);
  return m;
}

std::vector<MrcaEntry> mrca_table(const PointedTree& t) {
  int n = t.n_pointed();
  if (n < 1 || n > 20) throw TreeError("mrca_table needs 1 <= n <= 20");
  unsigned full = (1u << n) - 1u;
  std::vector<MrcaEntry> tab(full + 1u);
  for (unsigned a = 1; a <= full; ++a) {
    int v = -1;
    for (int i = 1; i <= n; ++i)
      if (a >> (i - 1) & 1u) v = v < 0 ? t.pointed(i) : t.lca(v, t.pointed(i));
    int w = -1;
    for (int j = 1; j <= n && w != v; ++j) {
      if (a >> (j - 1) & 1u) continue;
      if (t.is_ancestor(v, t.pointed(j))) w = v;
    }
    if (w != v) {
      w = 0;
      for (int j = 1; j <= n; ++j) {
        if (a >> (j - 1) & 1u) continue;
        int m = t.lca(v, t.pointed(j));
        if (t.height(m) > t.height(w)) w = m;
      }
    }
    tab[a] = {v, w, t.height(v) - t.height(w)};
  }
  return tab;
}

DistanceMatrix pointed_distances(const PointedTree& t) {
  int n = t.n_pointed();
  DistanceMatrix d(n);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) d.at(i, j) = t.distance(t.pointed(i), t.pointed(j));
  return d;
}

BranchCode code_L(const PointedTree& t) {
  auto tab = mrca_table(t);
  BranchCode c;
  c.n = t.n_pointed();
  c.lengths.assign(tab.size(), 0.0);
  for (std::size_t a = 1; a < tab.size(); ++a) c.lengths[a] = tab[a].ell;
  return c;
}

BranchCode matrix_L(const DistanceMatrix& d) {
  int n = d.n;
  auto fp = four_point_check(d, 1e-9);
  if (!fp.ok) throw TreeError("distance matrix violates the four-point condition");
  unsigned full = (1u << n) - 1u;
  BranchCode c;
  c.n = n;
  c.lengths.assign(full + 1u, 0.0);
  for (unsigned a = 1; a <= full; ++a) {
    std::vector<int> in, out{0};
    for (int i = 1; i <= n; ++i) (a >> (i - 1) & 1u ? in : out).push_back(i);
    double best = std::numeric_limits<double>::infinity();
    for (int i : in)
      for (int j : in)
        for (int ip : out)
          for (int jp : out) {
            double v = d.at(i, ip) + d.at(i, jp) + d.at(j, ip) + d.at(j, jp) - 2.0 * d.at(i, j) -
                       2.0 * d.at(ip, jp);
            best = std::min(best, v);
          }
    c.lengths[a] = std::max(0.0, best / 4.0);
  }
  return c;
}

DistanceMatrix code_D(const BranchCode& code) {
  int n = code.n;
  DistanceMatrix d(n);
  unsigned full = (1u << n) - 1u;
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      double s = 0.0;
      for (unsigned a = 1; a <= full; ++a) {
        bool ii = i > 0 && (a >> (i - 1) & 1u);
        bool jj = a >> (j - 1) & 1u;
        if (ii != jj) s += code.lengths[a];
      }
      d.at(i, j) = d.at(j, i) = s;
    }
  return d;
}

FourPointResult four_point_check(const DistanceMatrix& d, double tol) {
  FourPointResult r;
  int m = d.n + 1;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          double lhs = d.at(i, j) + d.at(k, l);
          double rhs = std::max(d.at(i, k) + d.at(j, l), d.at(i, l) + d.at(j, k));
          double ex = lhs - rhs;
          if (ex > tol && ex > r.excess) {
            r.ok = false;
            r.excess = ex;
            r.witness = {i, j, k, l};
          }
        }
  return r;
}

PointedTree realize_code(const BranchCode& code, double tol) {
  int n = code.n;
  unsigned full = (1u << n) - 1u;
  std::vector<unsigned> clusters;
  for (unsigned a = 1; a <= full; ++a)
    if (code.lengths[a] > tol) clusters.push_back(a);
  std::sort(clusters.begin(), clusters.end(), [](unsigned x, unsigned y) {
    return popcount(x) != popcount(y) ? popcount(x) > popcount(y) : x < y;
  });
  auto minimal_containing = [&](unsigned a, bool strict) -> int {
    int best = -1;
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      unsigned c = clusters[k];
      if ((c & a) != a || (strict && c == a)) continue;
      if (best < 0 || popcount(c) < popcount(clusters[best])) best = static_cast<int>(k);
    }
    return best;
  };
  PointedTree out;
  std::vector<int> vert(clusters.size(), 0);
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    int par = minimal_containing(clusters[k], true);
    if (par >= 0 && (clusters[par] & clusters[k]) != clusters[k]) throw TreeError("code is not laminar");
    for (std::size_t j = 0; j < k; ++j) {
      unsigned x = clusters[j], y = clusters[k];
      if ((x & y) && (x & y) != y && (x & y) != x) throw TreeError("code is not realizable");
    }
    vert[k] = out.add_child(par < 0 ? 0 : vert[par], code.lengths[clusters[k]]);
  }
  std::vector<int> pv{0};
  for (int i = 1; i <= n; ++i) {
    int k = minimal_containing(1u << (i - 1), false);
    pv.push_back(k < 0 ? 0 : vert[k]);
  }
  out.set_pointed(pv);
  return out;
}

std::vector<PointedTree> split_n(const PointedTree& t) {
  int n = t.n_pointed();
  if (n < 1 || n > 20) throw TreeError("split_n needs 1 <= n <= 20");
  unsigned full = (1u << n) - 1u;
  auto masks = subtree_masks(t);
  auto on = span_flags(t);
  std::vector<PointedTree> comps(full + 1u);
  // bushes at the root
  {
    PointedTree& c = comps[0];
    c.set_marked(0, t.marked(0));
    for (int ch : t.children(0)) {
      if (on[ch]) continue;
      int nc = c.add_child(0, t.length(ch), t.marked(ch));
      copy_below(t, ch, c, nc);
    }
  }
  for (int u = 1; u < t.size(); ++u) {
    if (!on[u]) continue;
    unsigned a = masks[u];
    int p = t.parent(u);
    if (p != 0 && masks[p] == a) continue;  // not the lowest edge of branch a
    PointedTree& c = comps[a];
    c.set_marked(0, t.marked(p));
    int top = 0;
    std::vector<std::pair<int, int>> st{{u, c.add_child(0, t.length(u), t.marked(u))}};
    while (!st.empty()) {
      auto [s, d] = st.back();
      st.pop_back();
      top = d;
      bool continues = false;
      for (int ch : t.children(s)) {
        if (on[ch] && masks[ch] != a) continue;
        int nc = c.add_child(d, t.length(ch), t.marked(ch));
        if (on[ch]) {
          st.emplace_back(ch, nc);
          continues = true;
        } else {
          copy_below(t, ch, c, nc);
        }
      }
      if (continues) continue;
      break;
    }
    c.set_pointed({0, top});
  }
  for (unsigned a = 1; a <= full; ++a)
    if (comps[a].n_pointed() == 0) comps[a].set_pointed({0, 0});
  return comps;
}

PointedTree spine_marked(const PointedTree& component, double extension) {
  PointedTree out = component;
  int v = component.n_pointed() >= 1 ? component.pointed(1) : 0;
  for (int x = v; x != -1; x = out.parent(x)) out.set_marked(x, true);
  int tip = out.add_child(v, extension, true);
  out.set_pointed({0, tip});
  out.set_unbounded_spine(true);
  return out;
}

namespace {

// Grafts r^{[2],+}_L of the spine-marked tree c at vertex base; returns the
// vertex of dst at spine height L.
int graft_truncated(PointedTree& dst, int base, const PointedTree& c, double L) {
  int s = 0, d = base;
  const double tol = 1e-12 * std::max(1.0, L);
  for (;;) {
    int next = -1;
    for (int ch : c.children(s)) {
      if (c.marked(ch)) {
        if (next >= 0) throw TreeError("marked part of a component must be a single branch");
        next = ch;
        continue;
      }
      int nc = dst.add_child(d, c.length(ch));
      copy_below(c, ch, dst, nc, nullptr, false);
    }
    double hs = c.height(s);
    if (next < 0) {
      if (L - hs > tol) {
        if (!c.unbounded_spine())
          throw TreeError("component shorter than its branch length");
        d = dst.add_child(d, L - hs);
      }
      return d;
    }
    // tolerance: heights are sums in a different order than the code lengths
    if (c.height(next) <= L + tol) {
      d = dst.add_child(d, c.length(next));
      s = next;
      continue;
    }
    if (L - hs > tol) d = dst.add_child(d, L - hs);
    return d;
  }
}

}  // namespace

PointedTree graft_n(const BranchCode& code, const std::vector<PointedTree>& components) {
  int n = code.n;
  unsigned full = (1u << n) - 1u;
  if (components.size() < full + 1u) throw TreeError("graft_n needs one component per subset");
  std::vector<unsigned> clusters;
  for (unsigned a = 1; a <= full; ++a)
    if (code.lengths[a] > 0.0) clusters.push_back(a);
  std::sort(clusters.begin(), clusters.end(), [](unsigned x, unsigned y) {
    return popcount(x) != popcount(y) ? popcount(x) > popcount(y) : x < y;
  });
  std::map<unsigned, int> vert;
  auto anchor = [&](unsigned a, bool strict) {
    int best = 0, bc = 64;
    for (auto& [c, v] : vert) {
      if ((c & a) != a || (strict && c == a)) continue;
      if (popcount(c) < bc) {
        bc = popcount(c);
        best = v;
      }
    }
    return best;
  };
  PointedTree out;
  for (unsigned a : clusters) {
    int base = anchor(a, true);
    vert[a] = graft_truncated(out, base, components[a], code.lengths[a]);
  }
  for (unsigned a = 1; a <= full; ++a) {
    if (code.lengths[a] > 0.0) continue;
    graft_truncated(out, anchor(a, false), components[a], 0.0);
  }
  std::vector<int> pv{0};
  for (int i = 1; i <= n; ++i) pv.push_back(anchor(1u << (i - 1), false));
  out.set_pointed(pv);
  return out;
}

PointedTree graft_n(const PointedTree& discrete, const std::vector<PointedTree>& components) {
  return graft_n(code_L(discrete), components);
}

PointedTree graft_at(const PointedTree& t, int i, double h, Side side, const PointedTree& g) {
  if (i < 1 || i > t.n_pointed()) throw TreeError("graft_at index out of range");
  int vi = t.pointed(i);
  if (h < 0.0 || h > t.height(vi)) throw TreeError("graft height above the pointed vertex");
  PointedTree out = t;
  int x = 0;
  if (h > 0.0) {
    auto path = out.path_from_root(vi);
    x = vi;
    for (std::size_t k = 1; k < path.size(); ++k)
      if (out.height(path[k]) >= h) {
        x = out.subdivide(path[k], h);
        break;
      }
  }
  // continuation child of x toward v_i
  int cont = -1;
  for (int ch : out.children(x))
    if (out.is_ancestor(ch, vi)) cont = ch;
  std::vector<int> map(g.size(), -1);
  map[0] = x;
  int pos;
  if (cont < 0) pos = side == Side::left ? 0 : -1;
  else {
    const auto& ch = out.children(x);
    int k = static_cast<int>(std::find(ch.begin(), ch.end(), cont) - ch.begin());
    pos = side == Side::left ? k : k + 1;
  }
  for (int ch : g.children(0)) {
    int nc = out.add_child(x, g.length(ch), g.marked(ch), pos);
    if (pos >= 0) ++pos;
    copy_below(g, ch, out, nc, &map);
  }
  std::vector<int> pv(t.pointed().begin(), t.pointed().end());
  std::vector<int> ins;
  for (int k = 1; k <= g.n_pointed(); ++k) ins.push_back(map[g.pointed(k)]);
  auto at = pv.begin() + (side == Side::left ? i : i + 1);
  pv.insert(at, ins.begin(), ins.end());
  out.set_pointed(pv);
  return out;
}

PointedTree vertex_graft(const PointedTree& t, int i, const PointedTree& g) {
  if (i < 0 || i > t.n_pointed()) throw TreeError("vertex_graft index out of range");
  PointedTree out = t;
  int x = t.pointed(i);
  std::vector<int> map(g.size(), -1);
  map[0] = x;
  for (int ch : g.children(0)) {
    int nc = out.add_child(x, g.length(ch), g.marked(ch));
    copy_below(g, ch, out, nc, &map);
  }
  for (int k = 1; k <= g.n_pointed(); ++k) out.push_pointed(map[g.pointed(k)]);
  return out;
}

PointedTree truncate(const PointedTree& t, double level) {
  auto on = span_flags(t);
  PointedTree out;
  out.set_marked(0, t.marked(0));
  std::vector<int> map(t.size(), -1);
  map[0] = 0;
  for (int v : t.preorder()) {
    if (v == 0) continue;
    int p = t.parent(v);
    if (map[p] < 0) continue;
    if (on[v] || t.height(v) <= level) {
      map[v] = out.add_child(map[p], t.length(v), t.marked(v));
    } else if (t.height(p) < level) {
      out.add_child(map[p], level - t.height(p), t.marked(v));
    }
  }
  std::vector<int> pv;
  for (int v : t.pointed()) pv.push_back(map[v]);
  out.set_pointed(pv);
  return out;
}

namespace {

PointedTree truncate2(const PointedTree& t, double level, bool strict) {
  auto core = core_flags(t);
  PointedTree out;
  out.set_marked(0, true);
  std::vector<int> map(t.size(), -1);
  map[0] = 0;
  // bushes are kept when they hang from the core below the level (or at it, for +)
  auto bush_ok = [&](double h) { return strict ? h < level : h <= level; };
  for (int v : t.preorder()) {
    if (v == 0) continue;
    int p = t.parent(v);
    if (map[p] < 0) continue;
    if (core[v]) {
      if (t.height(v) <= level) map[v] = out.add_child(map[p], t.length(v), true);
      else if (t.height(p) < level) out.add_child(map[p], level - t.height(p), true);
    } else if (!core[p] || bush_ok(t.height(p))) {
      map[v] = out.add_child(map[p], t.length(v), false);
    }
  }
  return out;
}

}  // namespace

PointedTree truncate2_plus(const PointedTree& t, double level) { return truncate2(t, level, false); }
PointedTree truncate2_minus(const PointedTree& t, double level) { return truncate2(t, level, true); }

PointedTree clean_root(const PointedTree& t) {
  auto core = core_flags(t);
  std::vector<char> keep(t.size(), 1);
  for (int v : t.preorder()) {
    if (v == 0) continue;
    int p = t.parent(v);
    if (!keep[p] || (p == 0 && !core[v])) keep[v] = 0;
  }
  std::vector<int> map;
  PointedTree out = restrict_to(t, keep, map);
  std::vector<int> pv;
  for (int v : t.pointed()) pv.push_back(map[v] < 0 ? 0 : map[v]);
  out.set_pointed(pv);
  out.set_unbounded_spine(t.unbounded_spine());
  return out;
}

PointedTree tree_from_measure(const std::vector<MeasureAtom>& atoms, double spine_length) {
  PointedTree out = PointedTree::segment(spine_length, true);
  out.set_pointed({0});
  out.set_unbounded_spine(true);
  std::vector<const MeasureAtom*> order;
  for (const auto& a : atoms) {
    if (a.h < 0.0) throw TreeError("atom below the root");
    if (a.h > spine_length) throw TreeError("atom above the represented spine");
    order.push_back(&a);
  }
  std::stable_sort(order.begin(), order.end(), [](auto* x, auto* y) { return x->h < y->h; });
  for (const MeasureAtom* a : order) {
    // walk the marked path to the point at height h
    int x = 0;
    for (;;) {
      int next = -1;
      for (int ch : out.children(x))
        if (out.marked(ch)) next = ch;
      if (next < 0 || a->h <= out.height(x)) break;
      if (out.height(next) >= a->h) {
        x = out.subdivide(next, a->h);
        break;
      }
      x = next;
    }
    for (int ch : a->tree.children(0)) {
      int nc = out.add_child(x, a->tree.length(ch));
      copy_below(a->tree, ch, out, nc, nullptr, false);
    }
  }
  return out;
}

std::vector<MeasureAtom> measure_from_tree(const PointedTree& t) {
  std::vector<MeasureAtom> atoms;
  for (int s : t.preorder()) {
    if (!t.marked(s) && s != 0) continue;
    for (int ch : t.children(s)) {
      if (t.marked(ch)) continue;
      MeasureAtom a;
      a.h = t.height(s);
      int nc = a.tree.add_child(0, t.length(ch));
      copy_below(t, ch, a.tree, nc, nullptr, false);
      atoms.push_back(std::move(a));
    }
  }
  std::stable_sort(atoms.begin(), atoms.end(), [](const MeasureAtom& x, const MeasureAtom& y) {
    if (x.h != y.h) return x.h < y.h;
    return canonical_string(x.tree, 17) < canonical_string(y.tree, 17);
  });
  return atoms;
}

PointedTree growth_n(const PointedTree& t, double h) {
  PointedTree out = t;
  std::vector<int> pv{0};
  for (int i = 1; i <= t.n_pointed(); ++i) pv.push_back(out.add_child(t.pointed(i), h));
  out.set_pointed(pv);
  return out;
}

double length_measure_total(const PointedTree& t) { return t.total_length(); }

double length_measure_weighted(const PointedTree& t, const HeightWeight& w) {
  double s = 0.0;
  for (int v = 1; v < t.size(); ++v) s += w.cdf(t.height(v)) - w.cdf(t.height(t.parent(v)));
  return s;
}

LengthPoint sample_length_point(const PointedTree& t, const HeightWeight& w, RandomStream& rs) {
  std::vector<double> cum;
  cum.reserve(t.size());
  double s = 0.0;
  for (int v = 1; v < t.size(); ++v) {
    s += w.cdf(t.height(v)) - w.cdf(t.height(t.parent(v)));
    cum.push_back(s);
  }
  if (!(s > 0.0)) throw TreeError("zero length measure");
  double u = rs.uniform() * s;
  int k = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
  k = std::min(k, t.size() - 2);
  int v = k + 1;
  double lo = w.cdf(t.height(t.parent(v)));
  double hi = w.cdf(t.height(v));
  double h = w.quantile(lo + rs.uniform() * (hi - lo));
  h = std::clamp(h, t.height(t.parent(v)), t.height(v));
  return {v, h};
}

HeightWeight uniform_height_weight() {
  return {[](double x) { return x; }, [](double u) { return u; }};
}

PointedTree suppress_degree_two(const PointedTree& t) {
  std::vector<char> is_pointed(t.size(), 0);
  for (int v : t.pointed()) is_pointed[v] = 1;
  auto removable = [&](int v) {
    return v != 0 && !is_pointed[v] && t.children(v).size() == 1 &&
           t.marked(v) == t.marked(t.children(v)[0]);
  };
  PointedTree out;
  out.set_marked(0, t.marked(0));
  out.set_unbounded_spine(t.unbounded_spine());
  std::vector<int> map(t.size(), -1);
  map[0] = 0;
  std::vector<std::pair<int, int>> st{{0, 0}};
  while (!st.empty()) {
    auto [s, d] = st.back();
    st.pop_back();
    std::vector<std::pair<int, int>> next;
    for (int ch : t.children(s)) {
      double len = t.length(ch);
      int c = ch;
      while (removable(c)) {
        c = t.children(c)[0];
        len += t.length(c);
      }
      int nc = out.add_child(d, len, t.marked(c));
      map[c] = nc;
      next.emplace_back(c, nc);
    }
    for (auto it = next.rbegin(); it != next.rend(); ++it) st.push_back(*it);
  }
  std::vector<int> pv;
  for (int v : t.pointed()) pv.push_back(map[v]);
  out.set_pointed(pv);
  return out;
}

namespace {

std::string vertex_label(const PointedTree& t, int v) {
  std::string s;
  for (int i = 1; i <= t.n_pointed(); ++i)
    if (t.pointed(i) == v) s += std::to_string(i) + ",";
  if (t.marked(v)) s += "m";
  return s;
}

std::string fmt_len(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string canon_rec(const PointedTree& t, int v, int digits, std::vector<std::string>* memo) {
  std::vector<std::string> parts;
  for (int c : t.children(v)) parts.push_back(canon_rec(t, c, digits, memo));
  std::sort(parts.begin(), parts.end());
  std::string s = "(" + vertex_label(t, v) + ":" + (v == 0 ? "0" : fmt_len(t.length(v), digits));
  for (auto& p : parts) s += p;
  s += ")";
  if (memo) (*memo)[v] = s;
  return s;
}

}  // namespace

std::string canonical_string(const PointedTree& t, int digits) {
  PointedTree s = suppress_degree_two(t);
  return std::string(s.unbounded_spine() ? "U" : "") + canon_rec(s, 0, digits, nullptr);
}

PointedTree canonicalize(const PointedTree& t) {
  PointedTree s = suppress_degree_two(t);
  std::vector<std::string> memo(s.size());
  canon_rec(s, 0, 17, &memo);
  PointedTree out;
  out.set_marked(0, s.marked(0));
  out.set_unbounded_spine(s.unbounded_spine());
  std::vector<int> map(s.size(), -1);
  map[0] = 0;
  std::vector<std::pair<int, int>> st{{0, 0}};
  while (!st.empty()) {
    auto [a, b] = st.back();
    st.pop_back();
    std::vector<int> ch = s.children(a);
    std::stable_sort(ch.begin(), ch.end(), [&](int x, int y) { return memo[x] < memo[y]; });
    std::vector<std::pair<int, int>> next;
    for (int c : ch) {
      int nc = out.add_child(b, s.length(c), s.marked(c));
      map[c] = nc;
      next.emplace_back(c, nc);
    }
    for (auto it = next.rbegin(); it != next.rend(); ++it) st.push_back(*it);
  }
  std::vector<int> pv;
  for (int v : s.pointed()) pv.push_back(map[v]);
  out.set_pointed(pv);
  return out;
}

namespace {

struct IsoCtx {
  const PointedTree& a;
  const PointedTree& b;
  double tol;
  std::map<std::pair<int, int>, bool> memo;

  bool close(double x, double y) const { return std::fabs(x - y) <= tol * std::max(1.0, std::fabs(x)); }

  bool eq(int u, int v) {
    auto key = std::make_pair(u, v);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool r = check(u, v);
    memo[key] = r;
    return r;
  }

  bool check(int u, int v) {
    if (vertex_label(a, u) != vertex_label(b, v)) return false;
    if (u != 0 && !close(a.length(u), b.length(v))) return false;
    const auto& cu = a.children(u);
    const auto& cv = b.children(v);
    if (cu.size() != cv.size()) return false;
    std::size_t k = cu.size();
    // bipartite matching by augmenting paths
    std::vector<int> match(k, -1);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<char> seen(k, 0);
      if (!augment(cu, cv, i, match, seen)) return false;
    }
    return true;
  }

  bool augment(const std::vector<int>& cu, const std::vector<int>& cv, std::size_t i,
               std::vector<int>& match, std::vector<char>& seen) {
    for (std::size_t j = 0; j < cv.size(); ++j) {
      if (seen[j] || !eq(cu[i], cv[j])) continue;
      seen[j] = 1;
      if (match[j] < 0 || augment(cu, cv, static_cast<std::size_t>(match[j]), match, seen)) {
        match[j] = static_cast<int>(i);
        return true;
      }
    }
    return false;
  }
};

}  // namespace

bool equivalent(const PointedTree& a, const PointedTree& b, double tol) {
  PointedTree sa = suppress_degree_two(a);
  PointedTree sb = suppress_degree_two(b);
  if (sa.size() != sb.size() || sa.n_pointed() != sb.n_pointed()) return false;
  if (sa.unbounded_spine() != sb.unbounded_spine()) return false;
  IsoCtx ctx{sa, sb, tol, {}};
  return ctx.eq(0, 0);
}

std::string to_text(const PointedTree& t) {
  std::vector<int> order = t.preorder();
  std::vector<int> id(t.size(), -1);
  for (std::size_t k = 0; k < order.size(); ++k) id[order[k]] = static_cast<int>(k);
  std::ostringstream os;
  os << "csbp-tree 1\n";
  os << "vertices " << t.size() << " pointed " << t.pointed().size() << " unbounded "
     << (t.unbounded_spine() ? 1 : 0) << "\n";
  std::vector<std::string> flags(t.size());
  for (int i = 0; i <= t.n_pointed(); ++i) flags[t.pointed(i)] += (flags[t.pointed(i)].empty() ? "" : ",") + std::to_string(i);
  for (int v : order) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0 ? 0.0 : t.length(v));
    os << id[v] << " " << (v == 0 ? -1 : id[t.parent(v)]) << " " << buf << " "
       << (flags[v].empty() ? "-" : flags[v]) << " " << (t.marked(v) ? 1 : 0) << "\n";
  }
  return os.str();
}

PointedTree from_text(const std::string& s) {
  std::istringstream is(s);
  std::string magic, word;
  int version = 0, nv = 0, np = 0, unb = 0;
  if (!(is >> magic >> version) || magic != "csbp-tree" || version != 1) throw TreeError("bad tree header");
  is >> word >> nv >> word >> np >> word >> unb;
  if (!is || nv < 1 || np < 1) throw TreeError("bad tree header");
  PointedTree t;
  std::vector<int> map(nv, -1);
  std::vector<int> pv(np, -1);
  for (int k = 0; k < nv; ++k) {
    int id, par, marked;
    double len;
    std::string fl;
    if (!(is >> id >> par >> len >> fl >> marked)) throw TreeError("truncated tree file");
    if (id < 0 || id >= nv) throw TreeError("bad vertex id");
    if (par < 0) {
      if (id != 0) throw TreeError("root must be vertex 0");
      map[0] = 0;
      t.set_marked(0, marked != 0);
    } else {
      if (par >= nv || map[par] < 0) throw TreeError("parent listed after child");
      if (!(len > 0.0)) throw TreeError("edge lengths must be positive");
      map[id] = t.add_child(map[par], len, marked != 0);
    }
    if (fl != "-") {
      std::istringstream fs(fl);
      std::string tok;
      while (std::getline(fs, tok, ',')) {
        int i = std::stoi(tok);
        if (i < 0 || i >= np) throw TreeError("pointed index out of range");
        pv[i] = map[id];
      }
    }
  }
  for (int v : pv)
    if (v < 0) throw TreeError("missing pointed vertex");
  t.set_pointed(pv);
  t.set_unbounded_spine(unb != 0);
  return t;
}

}  // namespace tree
}  // namespace csbp
