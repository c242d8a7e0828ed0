#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csbp/rng.hpp"

namespace csbp {

// Finite rooted tree with positive edge lengths. Vertex 0 is the root and
// pointed()[0] is always the root. Children are kept in planar (left to right)
// order. Marks, when present, form a subtree containing the root.
class PointedTree {
 public:
  PointedTree();
  static PointedTree segment(double len, bool marked = false);

  int size() const { return static_cast<int>(parent_.size()); }
  int root() const { return 0; }
  int parent(int v) const { return parent_[v]; }
  double length(int v) const { return len_[v]; }
  double height(int v) const { return height_[v]; }
  const std::vector<int>& children(int v) const { return children_[v]; }
  bool marked(int v) const { return marked_[v] != 0; }
  bool has_marks() const;

  // Adds a child at the right end (or at `pos`). A zero length returns the parent.
  int add_child(int parent, double len, bool marked = false, int pos = -1);
  // Vertex at height h on the edge above v, creating it when h is interior.
  int subdivide(int v, double h);
  void set_marked(int v, bool m) { marked_[v] = m ? 1 : 0; }

  const std::vector<int>& pointed() const { return pointed_; }
  int n_pointed() const { return static_cast<int>(pointed_.size()) - 1; }
  int pointed(int i) const { return pointed_[i]; }
  void set_pointed(std::vector<int> v);
  void push_pointed(int v) { pointed_.push_back(v); }

  bool unbounded_spine() const { return unbounded_; }
  void set_unbounded_spine(bool u) { unbounded_ = u; }

  bool is_ancestor(int a, int b) const;  // a on [root, b]
  int lca(int a, int b) const;
  double distance(int a, int b) const;
  double total_length() const;
  double max_height() const;
  std::vector<int> path_from_root(int v) const;
  // Pre-order traversal respecting planar order.
  std::vector<int> preorder() const;
  std::vector<int> leaves_planar() const;

 private:
  std::vector<int> parent_;
  std::vector<double> len_;
  std::vector<double> height_;
  std::vector<std::vector<int>> children_;
  std::vector<char> marked_;
  std::vector<int> pointed_;
  bool unbounded_ = false;
};

struct TreePoint {
  int v = 0;       // top vertex of the edge holding the point (root for the root)
  double h = 0.0;  // height of the point
};

// Distance between two points given as (edge top vertex, height).
double point_distance(const PointedTree& t, const TreePoint& a, const TreePoint& b);

// Branch lengths indexed by bitmask A over {1..n}; entry 0 unused.
struct BranchCode {
  int n = 0;
  std::vector<double> lengths;
  double& operator[](unsigned a) { return lengths[a]; }
  double operator[](unsigned a) const { return lengths[a]; }
};

struct DistanceMatrix {
  int n = 0;  // indices 0..n, 0 being the root
  std::vector<double> d;
  DistanceMatrix() = default;
  explicit DistanceMatrix(int n_) : n(n_), d(static_cast<std::size_t>((n_ + 1) * (n_ + 1)), 0.0) {}
  double& at(int i, int j) { return d[static_cast<std::size_t>(i * (n + 1) + j)]; }
  double at(int i, int j) const { return d[static_cast<std::size_t>(i * (n + 1) + j)]; }
};

struct MrcaEntry {
  int v = 0;
  int w = 0;
  double ell = 0.0;
};

struct FourPointResult {
  bool ok = true;
  std::array<int, 4> witness{0, 0, 0, 0};
  double excess = 0.0;
};

struct MeasureAtom {
  double h = 0.0;
  PointedTree tree;
};

struct LengthPoint {
  int v = 0;
  double h = 0.0;
};

// Height weighting used by length-measure sampling: cdf on [0, inf) and its inverse.
struct HeightWeight {
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
};

enum class Side { left, right };

class TreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace tree {

PointedTree span(const PointedTree& t);
TreePoint project(const PointedTree& t, int y);
// Bitmask of pointed indices (1..n) lying in the subtree of each vertex.
std::vector<unsigned> subtree_masks(const PointedTree& t);
std::vector<MrcaEntry> mrca_table(const PointedTree& t);

DistanceMatrix pointed_distances(const PointedTree& t);
BranchCode code_L(const PointedTree& t);
BranchCode matrix_L(const DistanceMatrix& d);
DistanceMatrix code_D(const BranchCode& code);
FourPointResult four_point_check(const DistanceMatrix& d, double tol = 1e-12);
// Discrete pointed tree with the given branch code.
PointedTree realize_code(const BranchCode& code, double tol = 0.0);

// Index 0 holds the bushes at the root; index A the component of branch A.
std::vector<PointedTree> split_n(const PointedTree& t);
// Marks the root-to-v_1 path and extends it by a bare marked segment.
PointedTree spine_marked(const PointedTree& component, double extension = 1.0);
PointedTree graft_n(const BranchCode& code, const std::vector<PointedTree>& components);
PointedTree graft_n(const PointedTree& discrete, const std::vector<PointedTree>& components);

PointedTree graft_at(const PointedTree& t, int i, double h, Side side, const PointedTree& g);
PointedTree vertex_graft(const PointedTree& t, int i, const PointedTree& g);

PointedTree truncate(const PointedTree& t, double level);
PointedTree truncate2_plus(const PointedTree& t, double level);
PointedTree truncate2_minus(const PointedTree& t, double level);
PointedTree clean_root(const PointedTree& t);

PointedTree tree_from_measure(const std::vector<MeasureAtom>& atoms, double spine_length);
std::vector<MeasureAtom> measure_from_tree(const PointedTree& t);

PointedTree growth_n(const PointedTree& t, double h);

double length_measure_total(const PointedTree& t);
double length_measure_weighted(const PointedTree& t, const HeightWeight& w);
LengthPoint sample_length_point(const PointedTree& t, const HeightWeight& w, RandomStream& rs);
HeightWeight uniform_height_weight();

// Removes non-root, unpointed vertices with one child and the same mark as it.
PointedTree suppress_degree_two(const PointedTree& t);
std::string canonical_string(const PointedTree& t, int digits = 12);
PointedTree canonicalize(const PointedTree& t);
bool equivalent(const PointedTree& a, const PointedTree& b, double tol = 1e-9);

std::string to_text(const PointedTree& t);
PointedTree from_text(const std::string& s);

struct RandomTreeSpec {
  int n_pointed = 3;
  int max_vertices = 40;
  double min_len = 0.05;
  double max_len = 1.0;
  bool root_branching = false;
  // chance that a pointed vertex is drawn among all vertices instead of the leaves
  double p_inner_pointed = 0.0;
};

// Random planar tree with the vertex count uniform on [n_pointed + 1, max_vertices].
PointedTree random_tree(const RandomTreeSpec& spec, RandomStream& rs);
// Marked spine [0, spine_length] carrying k atoms with random root-non-branching subtrees.
std::vector<MeasureAtom> random_atoms(int k, double spine_length, int max_vertices, RandomStream& rs);

}  // namespace tree
}  // namespace csbp
