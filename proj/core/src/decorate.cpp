#include "csbp/decorate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csbp/samplers.hpp"

namespace csbp {

double DecoratedBackbone::local_time(double level) const {
  double s = 0.0;
  for (const auto& d : decorations) {
    auto it = d.local_times.find(level);
    if (it != d.local_times.end()) s += it->second;
  }
  return s;
}

int DecoratedBackbone::surviving(double level) const {
  int c = 0;
  for (const auto& d : decorations)
    if (!d.aggregate && d.h < level && d.h + d.survival > level) ++c;
  return c;
}

namespace decorate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Survival height of an N-excursion conditioned to outlive tau.
double survival_beyond(const ModelParams& p, double tau, RandomStream& rs) {
  double y = rs.uniform_pos() * analytics::c_t(p, tau);
  if (p.theta < 0.0 && y <= -2.0 * p.theta) return kInf;
  return analytics::c_inverse(p, y);
}

// Decorations along the backbone edge with heights (a, b), observed at level s.
// Explicit records for tau = s - h in [max(eps, s - b), s - a]; when b == s the
// strip tau < eps is lumped into one Gamma(2, c~_eps) record.
void decorate_edge(const ModelParams& p, int branch, double a, double b, double s, double eps,
                   RandomStream& rs, std::vector<DecorationRecord>& out) {
  double lo = std::max(eps, s - b), hi = s - a;
  if (hi > lo) {
    double ct_lo = analytics::c_tilde_t(p, lo), ct_hi = analytics::c_tilde_t(p, hi);
    double span = std::log(ct_lo / ct_hi);
    double k = samplers::sample_poisson(2.0 * span, rs);
    for (double i = 0; i < k; i += 1.0) {
      double ct = ct_lo * std::exp(-rs.uniform() * span);
      double tau = std::clamp(analytics::c_tilde_inverse(p, ct), lo, hi);
      DecorationRecord r;
      r.branch = branch;
      r.h = s - tau;
      r.local_times[s] = samplers::sample_exponential(ct, rs);
      r.survival = survival_beyond(p, tau, rs);  // marginal law only
      out.push_back(std::move(r));
    }
  }
  if (b >= s) {
    DecorationRecord r;
    r.branch = branch;
    r.h = s - eps;
    r.aggregate = true;
    r.survival = kInf;
    r.local_times[s] = samplers::sample_gamma(2.0, analytics::c_tilde_t(p, eps), rs);
    out.push_back(std::move(r));
  }
}

DecoratedBackbone decorate_backbone(const ModelParams& p, PointedTree backbone, double s, double epsilon,
                                    RandomStream& rs) {
  double top_internal = 0.0;
  for (int v = 1; v < backbone.size(); ++v)
    if (!backbone.children(v).empty()) top_internal = std::max(top_internal, backbone.height(v));
  double eps = std::min(epsilon, 0.5 * (s - top_internal));
  if (!(eps > 0.0)) throw DomainError("backbone branch point at the observation level");
  DecoratedBackbone out;
  for (int v : backbone.preorder()) {
    if (v == 0) continue;
    double a = backbone.height(backbone.parent(v)), b = std::min(backbone.height(v), s);
    if (a >= s) continue;
    decorate_edge(p, v, a, b, s, eps, rs, out.decorations);
  }
  out.backbone = std::move(backbone);
  return out;
}

}  // namespace

DecoratedBackbone sample_kesten(const ModelParams& p, double s, RandomStream& rs, double epsilon) {
  if (!(s > 0.0)) throw DomainError("sample_kesten needs s > 0");
  return decorate_backbone(p, PointedTree::segment(s, true), s, epsilon, rs);
}

double sample_kesten_Zs(const ModelParams& p, double s, RandomStream& rs, double epsilon) {
  return sample_kesten(p, s, rs, epsilon).local_time(s);
}

Intensity backbone_intensity(const ModelParams& p) {
  return {p.alpha * p.beta, 2.0 * p.beta * p.theta};
}

DecoratedBackbone sample_decorated(const ModelParams& p, double s, RandomStream& rs, double epsilon) {
  if (!(s > 0.0)) throw DomainError("sample_decorated needs s > 0");
  if (!(p.alpha > 0.0)) return sample_kesten(p, s, rs, epsilon);
  FrakTSample sk = skeleton::sample_frakT(s, backbone_intensity(p), rs);
  return decorate_backbone(p, std::move(sk.tree), s, epsilon, rs);
}

double sample_decorated_Zs(const ModelParams& p, double s, RandomStream& rs, double epsilon) {
  return sample_decorated(p, s, rs, epsilon).local_time(s);
}

stats::TestReport mc_test_bismut1(const ModelParams& p, double t, double s, double lambda,
                                  const skeleton::McOptions& opt, std::uint64_t seed) {
  if (!(s > 0.0 && s < t)) throw DomainError("mc_test_bismut1 needs 0 < s < t");
  bool tilt = p.theta < 0.0;
  ModelParams q = tilt ? p.with_theta(-p.theta) : p;
  double th = std::fabs(p.theta);
  double cs = analytics::c_t(q, s);
  double front = std::exp(-2.0 * p.beta * p.theta * t);
  struct Acc {
    stats::Running lhs, rhs;
  };
  std::function<Acc(std::size_t, RandomStream&, std::size_t, std::size_t)> fn =
      [&](std::size_t, RandomStream& rs, std::size_t b, std::size_t e) {
        Acc a;
        for (std::size_t i = b; i < e; ++i) {
          double zs = samplers::sample_entrance_survival(q, s, rs);
          double zt = samplers::sample_transition(q, zs, t - s, rs);
          double w = tilt ? std::exp(2.0 * th * zt) : 1.0;
          a.lhs.add(cs * w * zt * std::exp(-lambda * zs));
          double zk = sample_kesten_Zs(q, s, rs);
          double wk = tilt ? std::exp(2.0 * th * zk - 4.0 * p.beta * th * s) : 1.0;
          a.rhs.add(front * wk * std::exp(-lambda * zk));
        }
        return a;
      };
  auto parts = stats::run_chunks<Acc>(opt.samples, opt.chunks, opt.jobs, RandomStream(seed), fn);
  Acc all;
  for (const auto& a : parts) {
    all.lhs.merge(a.lhs);
    all.rhs.merge(a.rhs);
  }
  return stats::make_report(all.lhs, all.rhs, seed);
}

DecoratedBackbone build_finite_decorated_tree(const ModelParams& p, double t, double epsilon,
                                              RandomStream& rs) {
  if (!(t > 0.0) || !(epsilon > 0.0)) throw DomainError("build_finite_decorated_tree domain");
  PointedTree bb = p.alpha > 0.0 ? skeleton::sample_frakT(t, backbone_intensity(p), rs).tree
                                 : PointedTree::segment(t);
  for (int v = 0; v < bb.size(); ++v) bb.set_marked(v, true);
  DecoratedBackbone out;
  double rate = 2.0 * p.beta * analytics::c_t(p, epsilon);
  double k = samplers::sample_poisson(rate * bb.total_length(), rs);
  HeightWeight w = tree::uniform_height_weight();
  for (double i = 0; i < k; i += 1.0) {
    LengthPoint x = tree::sample_length_point(bb, w, rs);
    DecorationRecord r;
    r.branch = x.v;
    r.h = x.h;
    r.survival = survival_beyond(p, epsilon, rs);
    out.decorations.push_back(r);
  }
  std::sort(out.decorations.begin(), out.decorations.end(),
            [](const DecorationRecord& a, const DecorationRecord& b) {
              return a.branch != b.branch ? a.branch < b.branch : a.h < b.h;
            });
  PointedTree tr = bb;
  for (const auto& r : out.decorations) {
    double top = std::min(r.h + r.survival, t);
    if (!(top > r.h)) continue;
    int x = tr.subdivide(r.branch, r.h);
    tr.add_child(x, top - r.h, false);
  }
  out.backbone = std::move(bb);
  out.tree = std::move(tr);
  return out;
}

}  // namespace decorate
}  // namespace csbp
