#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "csbp/rng.hpp"
#include "csbp/stats.hpp"
#include "csbp/tree.hpp"

namespace csbp {

// Probability density on [0, t].
class HeightDensity {
 public:
  enum class Kind { uniform01, moderate, table };

  static HeightDensity uniform(double t = 1.0);
  // density proportional to e^{r s} on [0,t]; r = 2 beta theta for the moderate regime
  static HeightDensity moderate(double beta, double theta, double t);
  static HeightDensity exponential_rate(double r, double t);
  // piecewise constant: weights[i] on [edges[i], edges[i+1])
  static HeightDensity table(std::vector<double> edges, std::vector<double> weights);

  Kind kind() const { return kind_; }
  double horizon() const { return t_; }
  double pdf(double s) const;
  double cdf(double s) const;
  double quantile(double u) const;
  double sample(RandomStream& rs) const { return quantile(rs.uniform()); }
  HeightWeight as_weight() const;
  std::string name() const;

 private:
  Kind kind_ = Kind::uniform01;
  double t_ = 1.0;
  double r_ = 0.0;
  std::vector<double> edges_, weights_, cum_;
};

// Intensity a e^{r s} ds on [0, inf).
struct Intensity {
  double a = 1.0;
  double r = 0.0;
  double cumulative(double t) const;
  double inverse_cumulative(double y) const;
};

enum class TreeStatistic { total_length, lowest_branch_height, left_count, mean_leaf_distance, one };

std::string statistic_name(TreeStatistic g);
double evaluate_statistic(const PointedTree& t, TreeStatistic g);

struct FrakTSample {
  PointedTree tree;
  int jumps = 0;
};

struct TnSequence {
  std::vector<PointedTree> trees;  // t_1..t_n
  std::vector<double> lengths;     // L(t_1)..L(t_n)
};

namespace skeleton {

// Grafts [0, len] at a point of the tree, to the left or right of all pointed
// leaves below the point.
PointedTree graft_at_point(const PointedTree& t, const LengthPoint& x, Side side, double len);

PointedTree sample_Tn(int n, const HeightDensity& density, double t, RandomStream& rs);
FrakTSample sample_frakT(double t, const Intensity& f_int, RandomStream& rs);
TnSequence sample_tn_sequence(int n, RandomStream& rs);

struct McOptions {
  std::size_t samples = 100000;
  std::size_t chunks = 64;
  int jobs = 1;
};

stats::TestReport mc_test_graft_lemma(int n, const HeightDensity& density, double t, TreeStatistic g,
                                      const McOptions& opt, std::uint64_t seed);
stats::TestReport mc_test_bt_identity(int n, TreeStatistic g, const McOptions& opt, std::uint64_t seed);

}  // namespace skeleton
}  // namespace csbp
