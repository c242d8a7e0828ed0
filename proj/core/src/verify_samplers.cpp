#include <algorithm>
#include <cmath>

#include "csbp/analytics.hpp"
#include "csbp/samplers.hpp"
#include "verify_detail.hpp"

namespace csbp::verify::detail {

namespace {

std::string label(const ModelParams& p, double t) {
  return "b" + num(p.beta) + "_th" + num(p.theta) + "_a" + num(p.alpha) + "_t" + num(t);
}

// Z_t under N: entrance at t/2 (mass c_{t/2}) pushed through the kernel over t/2.
// Returns the weight and sets z.
double chain_draw(const ModelParams& p, double t, RandomStream& rs, double& z) {
  double h = 0.5 * t;
  double z0 = samplers::sample_entrance_survival(p, h, rs);
  z = samplers::sample_transition(p, z0, h, rs);
  return analytics::c_t(p, h);
}

}  // namespace

SuiteReport suite_moments(const Options& o) {
  SuiteReport rep;
  struct Case {
    ModelParams p;
    double t;
  };
  const Case cases[] = {{{1.0, 0.0, 0.0}, 1.0}, {{1.0, 0.5, 0.0}, 1.0}, {{2.0, -0.5, 0.0}, 0.1}};
  std::size_t n = mc_samples(1000000, o);
  for (const auto& cs : cases) {
    std::string tag = label(cs.p, cs.t);
    std::uint64_t seed = sub_seed(o.seed, "moments/" + tag);
    // negative theta: draw under |theta| and reweight by e^{2|theta| Z_t}
    bool tilt = cs.p.theta < 0.0;
    ModelParams q = tilt ? cs.p.with_theta(-cs.p.theta) : cs.p;
    // N[(c~_t Z_t)^n] = n! c_t
    double ct = analytics::c_tilde_t(cs.p, cs.t);
    auto acc = mc_means(o, n, seed, 4, [&](RandomStream& rs, double* v) {
      double z;
      double w = chain_draw(q, cs.t, rs, z);
      if (tilt) w *= std::exp(2.0 * q.theta * z);
      double zn = w;
      for (int k = 0; k < 4; ++k) {
        zn *= ct * z;
        v[k] = zn;
      }
    });
    for (int k = 1; k <= 4; ++k) {
      double rhs = std::tgamma(k + 1.0) * analytics::c_t(cs.p, cs.t);
      auto r = stats::make_report_exact(acc[k - 1], rhs, seed);
      Check c = mc_check(tag + "_n" + std::to_string(k), r);
      c.data["tilted"] = tilt;
      rep.checks.push_back(std::move(c));
    }
  }
  return rep;
}

SuiteReport suite_martingales(const Options& o) {
  SuiteReport rep;
  std::size_t n = mc_samples(1000000, o);
  struct Case {
    ModelParams p;
    double t;
    bool tilde;
  };
  for (double alpha : {0.0, 1.0, 5.0}) {
    const Case cases[] = {{{1.0, 0.0, alpha}, 1.0, false},
                          {{1.0, 0.5, alpha}, 1.0, false},
                          {{1.0, 0.5, alpha}, 0.2, true},
                          {{1.0, -0.5, alpha}, 1.0, true}};
    for (const auto& cs : cases) {
      std::string tag = std::string(cs.tilde ? "Mtilde_" : "M_") + label(cs.p, cs.t);
      std::uint64_t seed = sub_seed(o.seed, "martingales/" + tag);
      auto acc = mc_mean(o, n, seed, [&](RandomStream& rs) {
        double z;
        double w = chain_draw(cs.p, cs.t, rs, z);
        return w * (cs.tilde ? analytics::martingale_Mtilde(cs.p, cs.t, z) : analytics::martingale_M(cs.p, cs.t, z));
      });
      rep.checks.push_back(mc_check(tag, stats::make_report_exact(acc, 1.0, seed)));
    }
  }
  return rep;
}

namespace {

double zalpha_cdf(const ModelParams& p, double t, double y) {
  double acc = 0.0, mass = 0.0;
  for (int k = 0; k < 10000; ++k) {
    double w = samplers::zalpha_count_pmf(p, t, k);
    acc += w * samplers::zalpha_value_cdf(p, t, k, y);
    mass += w;
    if (1.0 - mass < 1e-15 && k > samplers::immigration_mean_count(p, t)) break;
  }
  return acc;
}

}  // namespace

SuiteReport suite_zalpha(const Options& o) {
  SuiteReport rep;
  const double t = 1.0;
  const ModelParams cases[] = {{1.0, 0.0, 1.0}, {1.0, 0.5, 1.0}};
  for (const auto& p : cases) {
    std::string tag = label(p, t);
    // joint law of (jump count, value): k = 0..4 by value deciles, then k >= 5
    std::size_t n = mc_samples(200000, o);
    std::uint64_t seed = sub_seed(o.seed, "zalpha/joint/" + tag);
    auto draws = mc_collect<samplers::ZalphaDraw>(
        o, n, seed, [&](RandomStream& rs) { return samplers::sample_Zalpha_exact(p, t, rs); });
    const int K = 5, B = 10;
    std::vector<std::vector<double>> cuts(K);
    for (int k = 0; k < K; ++k)
      for (int b = 1; b < B; ++b) cuts[k].push_back(samplers::zalpha_value_quantile(p, t, k, b / double(B)));
    std::vector<double> obs(K * B + 1, 0.0), expv(K * B + 1, 0.0);
    for (const auto& d : draws) {
      if (d.jumps >= K) {
        obs[K * B] += 1.0;
        continue;
      }
      const auto& c = cuts[d.jumps];
      int b = static_cast<int>(std::upper_bound(c.begin(), c.end(), d.value) - c.begin());
      obs[d.jumps * B + b] += 1.0;
    }
    double tail = 1.0;
    for (int k = 0; k < K; ++k) {
      double pk = samplers::zalpha_count_pmf(p, t, k);
      tail -= pk;
      for (int b = 0; b < B; ++b) expv[k * B + b] = n * pk / B;
    }
    expv[K * B] = n * tail;
    auto chi = stats::chi2_test(obs, expv);
    rep.checks.push_back(p_check("joint_chi2_" + tag, chi.stat, chi.p, 0.01, {{"dof", chi.dof}, {"n_samples", n}}));

    std::size_t nl = mc_samples(1000000, o);
    std::uint64_t lseed = sub_seed(o.seed, "zalpha/laplace/" + tag);
    const double lams[] = {0.5, 1.0, 2.0};
    auto acc = mc_means(o, nl, lseed, 3, [&](RandomStream& rs, double* v) {
      double z = samplers::sample_Zalpha_exact(p, t, rs).value;
      for (int i = 0; i < 3; ++i) v[i] = std::exp(-lams[i] * z);
    });
    for (int i = 0; i < 3; ++i) {
      double rhs = p.theta == 0.0 ? samplers::zalpha_laplace_series(p, t, lams[i])
                                  : analytics::biased_laplace_poisson(p, t, lams[i]);
      rep.checks.push_back(
          mc_check("laplace_" + tag + "_lambda" + num(lams[i]), stats::make_report_exact(acc[i], rhs, lseed)));
    }
  }

  // Euler scheme against the exact law
  {
    ModelParams p{1.0, 0.0, 1.0};
    const double dt = 1e-4;
    std::size_t n = mc_samples(100000, o);
    std::uint64_t seed = sub_seed(o.seed, "zalpha/euler");
    auto vals = mc_collect<double>(o, n, seed,
                                   [&](RandomStream& rs) { return samplers::sample_Zalpha_euler(p, t, dt, rs).value; });
    auto ks = stats::ks_one_sample(vals, [&](double y) { return zalpha_cdf(p, t, y); });
    Check c;
    c.name = "euler_ks_" + label(p, t);
    c.data = {{"dt", dt}, {"n_samples", n}, {"seed", seed}, {"D", ks.d}, {"p", ks.p}, {"Dmax", 0.01}};
    c.pass = ks.d < 0.01;
    rep.checks.push_back(std::move(c));
  }

  double err = 0.0;
  for (double beta : {0.5, 1.0, 2.0})
    for (double theta : {-0.4, 0.0, 0.7})
      for (double alpha : {0.0, 0.5, 3.0})
        for (double s : {0.3, 1.0, 2.0})
          for (double lam : {0.1, 1.0, 5.0}) {
            ModelParams p{beta, theta, alpha};
            double a = samplers::zalpha_laplace_series(p, s, lam);
            double b = analytics::biased_laplace_poisson(p, s, lam);
            err = std::max(err, std::fabs(a - b) / b);
          }
  rep.checks.push_back(tol_check("series_vs_biased_laplace", err, 1e-12));
  return rep;
}

SuiteReport suite_samplers_props(const Options& o) {
  SuiteReport rep;
  std::size_t n = mc_samples(100000, o);
  ModelParams p{1.0, 0.3, 0.0};
  const double x = 1.0, t = 1.0, lam = 1.0;
  {
    std::uint64_t seed = sub_seed(o.seed, "props/transition");
    auto acc = mc_means(o, n, seed, 2, [&](RandomStream& rs, double* v) {
      double z = samplers::sample_transition(p, x, t, rs);
      v[0] = std::exp(-lam * z);
      v[1] = z == 0.0 ? 1.0 : 0.0;
    });
    rep.checks.push_back(mc_check("transition_laplace",
                                  stats::make_report_exact(acc[0], std::exp(-x * analytics::u(p, lam, t)), seed)));
    rep.checks.push_back(
        mc_check("transition_atom", stats::make_report_exact(acc[1], std::exp(-x * analytics::c_t(p, t)), seed)));
  }
  {
    std::uint64_t seed = sub_seed(o.seed, "props/entrance");
    auto acc = mc_means(o, n, seed, 2, [&](RandomStream& rs, double* v) {
      double z = samplers::sample_entrance_survival(p, t, rs);
      v[0] = z;
      v[1] = z * z;
    });
    double ct = analytics::c_tilde_t(p, t), c = analytics::c_t(p, t);
    rep.checks.push_back(
        mc_check("entrance_mean", stats::make_report_exact(acc[0], analytics::moment_n(p, t, 1) / c, seed)));
    rep.checks.push_back(mc_check("entrance_second", stats::make_report_exact(acc[1], 2.0 / (ct * ct), seed)));
  }
  {
    ModelParams pa{1.0, 0.4, 2.0};
    std::uint64_t seed = sub_seed(o.seed, "props/immigration");
    auto acc = mc_mean(o, n, seed, [&](RandomStream& rs) {
      return static_cast<double>(samplers::sample_immigration_jumps(pa, 1.5, rs).size());
    });
    rep.checks.push_back(
        mc_check("immigration_count", stats::make_report_exact(acc, samplers::immigration_mean_count(pa, 1.5), seed)));
  }
  {
    std::uint64_t s1 = sub_seed(o.seed, "props/one_step"), s2 = sub_seed(o.seed, "props/two_step");
    auto a = mc_collect<double>(o, n, s1, [&](RandomStream& rs) { return samplers::sample_transition(p, x, t, rs); });
    auto b = mc_collect<double>(o, n, s2, [&](RandomStream& rs) {
      return samplers::sample_csbp_path(p, x, {0.3 * t, t}, rs).values.back();
    });
    auto ks = stats::ks_two_sample(a, b);
    rep.checks.push_back(p_check("markov_one_vs_two_step", ks.d, ks.p));
  }
  {
    double err = 0.0;
    for (double theta : {-1.0, 0.0, 0.5, 1.0})
      for (double tt : {0.1, 1.0, 3.0}) {
        ModelParams q{1.3, theta, 0.0};
        double s = samplers::time_change_map(q, tt, TimeDirection::to_s);
        err = std::max(err, std::fabs(samplers::time_change_map(q, s, TimeDirection::to_t) - tt) / tt);
      }
    double v = samplers::time_change_map({1.0, 1.0, 0.0}, 1.0, TimeDirection::to_s);
    err = std::max(err, std::fabs(v - 0.5 * std::expm1(2.0)));
    rep.checks.push_back(tol_check("time_change", err, 1e-12));
  }
  {
    double err = 0.0;
    for (double alpha : {0.1, 1.0, 5.0})
      for (double y : {0.01, 1.0, 10.0, 100.0}) {
        double sum = 0.0;
        for (int k = 0; k < 2000; ++k) sum += samplers::conditional_S_given_Y(alpha, y, k);
        err = std::max(err, std::fabs(sum - 1.0));
      }
    rep.checks.push_back(tol_check("S_given_Y_normalized", err, 1e-12));
  }
  {
    // at theta = 0 the jump count given Z^alpha_t = y has law P(S = . | Y = y)
    ModelParams pa{1.0, 0.0, 1.5};
    std::uint64_t seed = sub_seed(o.seed, "props/S_given_Y");
    auto draws = mc_collect<samplers::ZalphaDraw>(
        o, n, seed, [&](RandomStream& rs) { return samplers::sample_Zalpha_exact(pa, t, rs); });
    const int K = 12;
    std::vector<double> obs(K + 1, 0.0), expv(K + 1, 0.0);
    for (const auto& d : draws) {
      obs[std::min(d.jumps, K)] += 1.0;
      double rest = 1.0;
      for (int k = 0; k < K; ++k) {
        double q = samplers::conditional_S_given_Y(pa.alpha, d.value, k);
        expv[k] += q;
        rest -= q;
      }
      expv[K] += std::max(0.0, rest);
    }
    auto chi = stats::chi2_test(obs, expv);
    rep.checks.push_back(p_check("S_given_Y_empirical", chi.stat, chi.p, 0.01, {{"dof", chi.dof}}));
  }
  return rep;
}

}  // namespace csbp::verify::detail
