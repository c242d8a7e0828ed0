#include <algorithm>
#include <cmath>

#include "csbp/tree.hpp"

namespace csbp::tree {

namespace {

double draw_len(const RandomTreeSpec& s, RandomStream& rs) {
  return s.min_len + (s.max_len - s.min_len) * rs.uniform();
}

}  // namespace

PointedTree random_tree(const RandomTreeSpec& spec, RandomStream& rs) {
  if (spec.n_pointed < 0 || spec.max_vertices < 2 || !(spec.min_len > 0.0) || spec.max_len < spec.min_len)
    throw TreeError("bad random tree spec");
  int lo = std::max(2, spec.n_pointed + 1);
  int hi = std::max(lo, spec.max_vertices);
  int target = lo + static_cast<int>(rs.below(static_cast<std::uint64_t>(hi - lo + 1)));
  PointedTree t;
  t.add_child(0, draw_len(spec, rs));
  while (t.size() < target) {
    int first = spec.root_branching ? 0 : 1;
    int v = first + static_cast<int>(rs.below(static_cast<std::uint64_t>(t.size() - first)));
    // split the edge above v first, half of the time, when there is room for two vertices
    if (v != 0 && t.size() + 2 <= target && rs.below(2) == 0) {
      double h = t.height(t.parent(v)) + t.length(v) * (0.1 + 0.8 * rs.uniform());
      v = t.subdivide(v, h);
    }
    int pos = static_cast<int>(rs.below(t.children(v).size() + 1));
    t.add_child(v, draw_len(spec, rs), false, pos);
  }
  std::vector<int> leaves = t.leaves_planar();
  for (std::size_t i = leaves.size(); i > 1; --i) std::swap(leaves[i - 1], leaves[rs.below(i)]);
  std::vector<int> pv{0};
  std::size_t next = 0;
  for (int i = 0; i < spec.n_pointed; ++i) {
    bool inner = spec.p_inner_pointed > 0.0 && rs.uniform() < spec.p_inner_pointed;
    if (!inner && next < leaves.size()) {
      pv.push_back(leaves[next++]);
    } else {
      pv.push_back(1 + static_cast<int>(rs.below(static_cast<std::uint64_t>(t.size() - 1))));
    }
  }
  t.set_pointed(pv);
  return t;
}

std::vector<MeasureAtom> random_atoms(int k, double spine_length, int max_vertices, RandomStream& rs) {
  std::vector<MeasureAtom> atoms;
  RandomTreeSpec spec;
  spec.n_pointed = 0;
  spec.max_vertices = std::max(2, max_vertices);
  spec.max_len = 0.5;
  for (int i = 0; i < k; ++i) {
    MeasureAtom a;
    a.h = spine_length * rs.uniform();
    a.tree = random_tree(spec, rs);
    atoms.push_back(std::move(a));
  }
  return atoms;
}

}  // namespace csbp::tree
