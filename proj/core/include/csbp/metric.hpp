#pragma once

#include <stdexcept>

#include "csbp/tree.hpp"

namespace csbp {

struct DistanceBound {
  double lower = 0.0;
  double upper = 0.0;
};

struct LghSpec {
  int panels = 256;
};

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace metric {

// Half the largest discrepancy between pointed distance matrices.
double gh_lower(const PointedTree& a, const PointedTree& b);

// Half the distortion of an explicit correspondence: spans matched branch by
// branch (proportionally along each branch), off-span bushes sent to the
// image of their attach point. Zero for equivalent trees.
double gh_upper(const PointedTree& a, const PointedTree& b);

// Exact pointed GH between delta-refined vertex sets, widened by the
// refinement error. Throws when a refined tree has more than max_vertices.
DistanceBound gh_exact_small(const PointedTree& a, const PointedTree& b, double delta,
                             int max_vertices = 12);
// Exact pointed GH distance between finite pointed metric spaces
// (point 0 is the root, points 1..n the pointed ones in order).
double gh_finite(const std::vector<std::vector<double>>& da, const std::vector<std::vector<double>>& db,
                 int n_pointed);

// Integral of e^{-t} (1 ^ d_GH(r_t a, r_t b)) with the integrand bracketed by
// the lower and upper bounds.
DistanceBound lgh_numeric(const PointedTree& a, const PointedTree& b, const LghSpec& spec = {});

}  // namespace metric
}  // namespace csbp
