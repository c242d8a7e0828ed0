#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "csbp/analytics.hpp"
#include "csbp/rng.hpp"
#include "csbp/skeleton.hpp"
#include "csbp/stats.hpp"
#include "csbp/tree.hpp"

namespace csbp {

struct DecorationRecord {
  int branch = 0;           // backbone vertex at the top of the carrying edge
  double h = 0.0;           // attach height
  double survival = 0.0;    // extinction height above h; infinity if it never dies
  bool aggregate = false;   // lumps every decoration attached in [h, level) of a leaf edge
  std::map<double, double> local_times;  // level -> mass
};

struct DecoratedBackbone {
  PointedTree backbone;
  std::vector<DecorationRecord> decorations;
  // backbone (marked) with one unmarked stub per decoration; only filled by
  // build_finite_decorated_tree
  PointedTree tree;

  double local_time(double level) const;
  int surviving(double level) const;
};

namespace decorate {

// Records of a decoration sampler with cutoff epsilon below the observation
// level are exact for every epsilon in (0, level]; it only moves work between
// explicit records and the lumped top strip.
constexpr double kDefaultEpsilon = 0.05;

double sample_kesten_Zs(const ModelParams& p, double s, RandomStream& rs,
                        double epsilon = kDefaultEpsilon);
DecoratedBackbone sample_kesten(const ModelParams& p, double s, RandomStream& rs,
                                double epsilon = kDefaultEpsilon);

// Backbone with immigration intensity alpha beta e^{2 beta theta h} on [0,s].
Intensity backbone_intensity(const ModelParams& p);
DecoratedBackbone sample_decorated(const ModelParams& p, double s, RandomStream& rs,
                                   double epsilon = kDefaultEpsilon);
double sample_decorated_Zs(const ModelParams& p, double s, RandomStream& rs,
                           double epsilon = kDefaultEpsilon);

// N^theta[Z_t e^{-lambda Z_s}] against e^{-2 beta theta t} E[e^{-lambda Z_s^*}]
// on the Kesten tree. theta < 0 goes through the e^{2 theta Z} change of measure.
stats::TestReport mc_test_bismut1(const ModelParams& p, double t, double s, double lambda,
                                  const skeleton::McOptions& opt, std::uint64_t seed);

// Backbone (a spine when alpha = 0) with stubs for every decoration whose
// survival height exceeds epsilon, cut at height t.
DecoratedBackbone build_finite_decorated_tree(const ModelParams& p, double t, double epsilon,
                                              RandomStream& rs);

}  // namespace decorate
}  // namespace csbp
