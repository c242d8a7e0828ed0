#include "csbp/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csbp {

HeightDensity HeightDensity::uniform(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("density horizon must be positive");
  HeightDensity d;
  d.kind_ = Kind::uniform01;
  d.t_ = t;
  return d;
}

HeightDensity HeightDensity::exponential_rate(double r, double t) {
  HeightDensity d = uniform(t);
  d.kind_ = Kind::moderate;
  d.r_ = r;
  return d;
}

HeightDensity HeightDensity::moderate(double beta, double theta, double t) {
  return exponential_rate(2.0 * beta * theta, t);
}

HeightDensity HeightDensity::table(std::vector<double> edges, std::vector<double> weights) {
  if (edges.size() < 2 || weights.size() + 1 != edges.size())
    throw std::invalid_argument("table density needs k+1 edges for k weights");
  if (edges.front() != 0.0) throw std::invalid_argument("table density must start at 0");
  HeightDensity d;
  d.kind_ = Kind::table;
  d.t_ = edges.back();
  double tot = 0.0;
  d.cum_.push_back(0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(edges[i + 1] > edges[i]) || !(weights[i] > 0.0))
      throw std::invalid_argument("table density needs increasing edges and positive weights");
    tot += weights[i] * (edges[i + 1] - edges[i]);
    d.cum_.push_back(tot);
  }
  for (double& c : d.cum_) c /= tot;
  for (double& w : weights) w /= tot;
  d.edges_ = std::move(edges);
  d.weights_ = std::move(weights);
  return d;
}

double HeightDensity::pdf(double s) const {
  if (s < 0.0 || s > t_) return 0.0;
  switch (kind_) {
    case Kind::uniform01:
      return 1.0 / t_;
    case Kind::moderate:
      if (std::fabs(r_ * t_) < 1e-12) return 1.0 / t_;
      return r_ * std::exp(r_ * s) / std::expm1(r_ * t_);
    case Kind::table: {
      auto it = std::upper_bound(edges_.begin(), edges_.end(), s);
      std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - edges_.begin()), weights_.size()) - 1;
      return weights_[i];
    }
  }
  return 0.0;
}

double HeightDensity::cdf(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= t_) return 1.0;
  switch (kind_) {
    case Kind::uniform01:
      return s / t_;
    case Kind::moderate:
      if (std::fabs(r_ * t_) < 1e-12) return s / t_;
      return std::expm1(r_ * s) / std::expm1(r_ * t_);
    case Kind::table: {
      auto it = std::upper_bound(edges_.begin(), edges_.end(), s);
      std::size_t i = static_cast<std::size_t>(it - edges_.begin()) - 1;
      return cum_[i] + weights_[i] * (s - edges_[i]);
    }
  }
  return 0.0;
}

double HeightDensity::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  switch (kind_) {
    case Kind::uniform01:
      return u * t_;
    case Kind::moderate:
      if (std::fabs(r_ * t_) < 1e-12) return u * t_;
      return std::clamp(std::log1p(u * std::expm1(r_ * t_)) / r_, 0.0, t_);
    case Kind::table: {
      auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
      std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()), weights_.size()) - 1;
      return std::clamp(edges_[i] + (u - cum_[i]) / weights_[i], edges_[i], edges_[i + 1]);
    }
  }
  return 0.0;
}

HeightWeight HeightDensity::as_weight() const {
  HeightDensity self = *this;
  return {[self](double s) { return self.cdf(s); }, [self](double u) { return self.quantile(u); }};
}

std::string HeightDensity::name() const {
  switch (kind_) {
    case Kind::uniform01:
      return "uniform";
    case Kind::moderate:
      return "moderate";
    case Kind::table:
      return "table";
  }
  return "?";
}

double Intensity::cumulative(double t) const {
  if (r == 0.0) return a * t;
  return a * std::expm1(r * t) / r;
}

double Intensity::inverse_cumulative(double y) const {
  if (r == 0.0) return y / a;
  return std::log1p(r * y / a) / r;
}

std::string statistic_name(TreeStatistic g) {
  switch (g) {
    case TreeStatistic::total_length:
      return "total_length";
    case TreeStatistic::lowest_branch_height:
      return "lowest_branch_height";
    case TreeStatistic::left_count:
      return "left_count";
    case TreeStatistic::mean_leaf_distance:
      return "mean_leaf_distance";
    case TreeStatistic::one:
      return "one";
  }
  return "?";
}

namespace {

int lowest_branch_vertex(const PointedTree& t) {
  int v = 0;
  while (t.children(v).size() == 1) v = t.children(v)[0];
  return v;
}

int leaf_count(const PointedTree& t, int v) {
  int c = 0;
  std::vector<int> st{v};
  while (!st.empty()) {
    int x = st.back();
    st.pop_back();
    if (t.children(x).empty()) ++c;
    for (int y : t.children(x)) st.push_back(y);
  }
  return c;
}

}  // namespace

double evaluate_statistic(const PointedTree& t, TreeStatistic g) {
  switch (g) {
    case TreeStatistic::total_length:
      return t.total_length();
    case TreeStatistic::lowest_branch_height:
      return t.height(lowest_branch_vertex(t));
    case TreeStatistic::left_count: {
      int v = lowest_branch_vertex(t);
      if (t.children(v).size() < 2) return 0.0;
      return leaf_count(t, t.children(v)[0]);
    }
    case TreeStatistic::mean_leaf_distance: {
      int n = t.n_pointed();
      if (n < 2) return 0.0;
      double s = 0.0;
      for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) s += t.distance(t.pointed(i), t.pointed(j));
      return s / (0.5 * n * (n - 1));
    }
    case TreeStatistic::one:
      return 1.0;
  }
  return 0.0;
}

namespace skeleton {

namespace {

Side random_side(RandomStream& rs) { return rs.below(2) == 0 ? Side::left : Side::right; }

struct LhsRhs {
  stats::Running lhs, rhs;
};

stats::TestReport merge_report(const std::vector<LhsRhs>& parts, std::uint64_t seed) {
  LhsRhs all;
  for (const auto& p : parts) {
    all.lhs.merge(p.lhs);
    all.rhs.merge(p.rhs);
  }
  return stats::make_report(all.lhs, all.rhs, seed);
}

}  // namespace

PointedTree graft_at_point(const PointedTree& t, const LengthPoint& x, Side side, double len) {
  int lo = -1, hi = -1;
  for (int i = 1; i <= t.n_pointed(); ++i) {
    if (!t.is_ancestor(x.v, t.pointed(i))) continue;
    if (lo < 0) lo = i;
    hi = i;
  }
  if (lo < 0) throw TreeError("graft point has no pointed vertex below it");
  return tree::graft_at(t, side == Side::left ? lo : hi, x.h, side, PointedTree::segment(len));
}

PointedTree sample_Tn(int n, const HeightDensity& density, double t, RandomStream& rs) {
  if (n < 1) throw std::invalid_argument("sample_Tn needs n >= 1");
  std::vector<double> xi(static_cast<std::size_t>(n - 1));
  for (double& x : xi) x = std::min(density.sample(rs), t);
  std::sort(xi.begin(), xi.end());
  PointedTree tr = PointedTree::segment(t);
  for (int k = 1; k < n; ++k) {
    int K = 1 + static_cast<int>(rs.below(static_cast<std::uint64_t>(k)));
    Side side = random_side(rs);
    double h = xi[static_cast<std::size_t>(k - 1)];
    tr = tree::graft_at(tr, K, h, side, PointedTree::segment(t - h));
  }
  return tr;
}

FrakTSample sample_frakT(double t, const Intensity& f_int, RandomStream& rs) {
  if (!(t > 0.0)) throw std::invalid_argument("sample_frakT needs t > 0");
  std::vector<double> jumps;
  double total = f_int.cumulative(t), y = 0.0;
  for (;;) {
    y += -std::log(rs.uniform_pos());
    if (y > total) break;
    jumps.push_back(std::min(f_int.inverse_cumulative(y), t));
  }
  FrakTSample out{PointedTree::segment(t), static_cast<int>(jumps.size())};
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    int K = 1 + static_cast<int>(rs.below(k + 1));
    Side side = random_side(rs);
    out.tree = tree::graft_at(out.tree, K, jumps[k], side, PointedTree::segment(t - jumps[k]));
  }
  return out;
}

TnSequence sample_tn_sequence(int n, RandomStream& rs) {
  if (n < 1) throw std::invalid_argument("sample_tn_sequence needs n >= 1");
  TnSequence seq;
  seq.trees.push_back(PointedTree::segment(1.0));
  seq.lengths.push_back(1.0);
  HeightWeight w = tree::uniform_height_weight();
  for (int k = 1; k < n; ++k) {
    const PointedTree& cur = seq.trees.back();
    LengthPoint v = tree::sample_length_point(cur, w, rs);
    Side side = random_side(rs);
    PointedTree next = graft_at_point(cur, v, side, 1.0 - v.h);
    seq.lengths.push_back(next.total_length());
    seq.trees.push_back(std::move(next));
  }
  return seq;
}

stats::TestReport mc_test_graft_lemma(int n, const HeightDensity& density, double t, TreeStatistic g,
                                      const McOptions& opt, std::uint64_t seed) {
  HeightWeight w = density.as_weight();
  double factor = 0.5 * (n + 1);
  std::function<LhsRhs(std::size_t, RandomStream&, std::size_t, std::size_t)> fn =
      [&](std::size_t, RandomStream& rs, std::size_t b, std::size_t e) {
        LhsRhs r;
        for (std::size_t i = b; i < e; ++i) {
          PointedTree tn = sample_Tn(n, density, t, rs);
          double mass = tree::length_measure_weighted(tn, w);
          LengthPoint x = tree::sample_length_point(tn, w, rs);
          Side side = random_side(rs);
          r.lhs.add(mass * evaluate_statistic(graft_at_point(tn, x, side, t - x.h), g));
          r.rhs.add(factor * evaluate_statistic(sample_Tn(n + 1, density, t, rs), g));
        }
        return r;
      };
  auto parts = stats::run_chunks<LhsRhs>(opt.samples, opt.chunks, opt.jobs, RandomStream(seed), fn);
  return merge_report(parts, seed);
}

stats::TestReport mc_test_bt_identity(int n, TreeStatistic g, const McOptions& opt, std::uint64_t seed) {
  double factor = std::ldexp(1.0, n - 1) / std::tgamma(n + 1.0);
  Intensity unit{1.0, 0.0};
  std::function<LhsRhs(std::size_t, RandomStream&, std::size_t, std::size_t)> fn =
      [&](std::size_t, RandomStream& rs, std::size_t b, std::size_t e) {
        LhsRhs r;
        for (std::size_t i = b; i < e; ++i) {
          FrakTSample s;
          do s = sample_frakT(1.0, unit, rs);
          while (s.jumps != n - 1);
          r.lhs.add(evaluate_statistic(s.tree, g));
          TnSequence seq = sample_tn_sequence(n, rs);
          double wgt = factor;
          for (int k = 0; k + 1 < n; ++k) wgt *= seq.lengths[static_cast<std::size_t>(k)];
          r.rhs.add(wgt * evaluate_statistic(seq.trees.back(), g));
        }
        return r;
      };
  auto parts = stats::run_chunks<LhsRhs>(opt.samples, opt.chunks, opt.jobs, RandomStream(seed), fn);
  return merge_report(parts, seed);
}

}  // namespace skeleton
}  // namespace csbp
