#include <algorithm>
#include <cmath>

#include "csbp/analytics.hpp"
#include "csbp/decorate.hpp"
#include "csbp/samplers.hpp"
#include "csbp/skeleton.hpp"
#include "verify_detail.hpp"

namespace csbp::verify::detail {

namespace {

const TreeStatistic kGraftStats[] = {TreeStatistic::total_length, TreeStatistic::lowest_branch_height,
                                     TreeStatistic::left_count};

std::vector<int> n_range(const Options& o, std::vector<int> all) {
  if (o.only_n == 0) return all;
  return {o.only_n};
}

std::string plabel(const ModelParams& p) {
  return "b" + num(p.beta) + "_th" + num(p.theta) + "_a" + num(p.alpha);
}

}  // namespace

SuiteReport suite_graft_lemma(const Options& o) {
  SuiteReport rep;
  const double t = 1.0;
  const HeightDensity dens[] = {HeightDensity::uniform(t), HeightDensity::moderate(1.0, 0.5, t)};
  for (int n : n_range(o, {1, 2, 3, 4}))
    for (const auto& d : dens)
      for (TreeStatistic g : kGraftStats) {
        std::string tag = "n" + std::to_string(n) + "_" + d.name() + "_" + statistic_name(g);
        std::uint64_t seed = sub_seed(o.seed, "graft-lemma/" + tag);
        auto r = skeleton::mc_test_graft_lemma(n, d, t, g, mc(o, 100000), seed);
        rep.checks.push_back(mc_check(tag, r));
      }
  return rep;
}

SuiteReport suite_bt_identity(const Options& o) {
  SuiteReport rep;
  for (int n : n_range(o, {2, 3}))
    for (TreeStatistic g : {TreeStatistic::lowest_branch_height, TreeStatistic::total_length}) {
      std::string tag = "n" + std::to_string(n) + "_" + statistic_name(g);
      std::uint64_t seed = sub_seed(o.seed, "bt-identity/" + tag);
      rep.checks.push_back(mc_check(tag, skeleton::mc_test_bt_identity(n, g, mc(o, 100000), seed)));
    }
  return rep;
}

SuiteReport suite_bismut(const Options& o) {
  SuiteReport rep;
  const double s = 0.5, t = 1.0;
  double exact_err = 0.0;
  for (double theta : {0.0, 0.5, -0.3}) {
    ModelParams p{1.0, theta, 0.0};
    double front = std::exp(-2.0 * p.beta * theta * t);
    exact_err = std::max(exact_err, std::fabs(analytics::moment_n(p, t, 1) - front) / front);
    for (double lam : {0.0, 1.0}) {
      std::string tag = plabel(p) + "_lambda" + num(lam);
      std::uint64_t seed = sub_seed(o.seed, "bismut/" + tag);
      auto r = decorate::mc_test_bismut1(p, t, s, lam, mc(o, 100000), seed);
      rep.checks.push_back(mc_check(tag, r));
      // without tilt the right side is deterministic at lambda = 0
      if (lam == 0.0 && theta >= 0.0) exact_err = std::max(exact_err, std::fabs(r.rhs - front) / front);
    }
  }
  rep.checks.push_back(tol_check("lambda0_exact", exact_err, 1e-10));
  return rep;
}

SuiteReport suite_taq(const Options& o) {
  SuiteReport rep;
  const double s = 1.0, lam = 1.0;
  for (const ModelParams& p : {ModelParams{1.0, 0.0, 1.0}, ModelParams{1.0, 0.5, 2.0}}) {
    std::string tag = plabel(p) + "_s" + num(s);
    std::size_t n = mc_samples(100000, o);
    std::uint64_t sa = sub_seed(o.seed, "taq/decorated/" + tag), sb = sub_seed(o.seed, "taq/exact/" + tag);
    auto a = mc_collect<double>(o, n, sa, [&](RandomStream& rs) { return decorate::sample_decorated_Zs(p, s, rs); });
    auto b = mc_collect<double>(o, n, sb,
                                [&](RandomStream& rs) { return samplers::sample_Zalpha_exact(p, s, rs).value; });
    stats::Running la;
    for (double z : a) la.add(std::exp(-lam * z));
    auto ks = stats::ks_two_sample(a, b);
    rep.checks.push_back(p_check("ks_" + tag, ks.d, ks.p, 0.01, {{"n_samples", n}, {"seed", sa}}));
    rep.checks.push_back(mc_check("laplace_" + tag, stats::make_report_exact(
                                                        la, analytics::biased_laplace_poisson(p, s, lam), sa)));
  }
  return rep;
}

SuiteReport suite_skeleton_props(const Options& o) {
  SuiteReport rep;
  std::size_t N = mc_samples(100000, o);
  const double t = 1.0;
  HeightDensity uni = HeightDensity::uniform(t);
  {
    // T_4: three graft heights, lowest ~ Beta(1,3); left block size uniform on {1,2,3}
    const int n = 4;
    std::uint64_t seed = sub_seed(o.seed, "skeleton-props/T4");
    struct Row {
      double low;
      int left;
      bool leaves_ok;
    };
    auto rows = mc_collect<Row>(o, N, seed, [&](RandomStream& rs) {
      PointedTree tr = skeleton::sample_Tn(n, uni, t, rs);
      bool ok = true;
      for (int i = 1; i <= tr.n_pointed(); ++i) ok = ok && tr.height(tr.pointed(i)) == t;
      return Row{evaluate_statistic(tr, TreeStatistic::lowest_branch_height),
                 static_cast<int>(evaluate_statistic(tr, TreeStatistic::left_count)), ok};
    });
    std::vector<double> low;
    std::vector<double> obs(n - 1, 0.0), expv(n - 1, N / double(n - 1));
    std::vector<std::vector<double>> table(n - 1, std::vector<double>(4, 0.0));
    std::size_t bad_leaves = 0;
    for (const auto& r : rows) {
      low.push_back(r.low);
      obs[r.left - 1] += 1.0;
      // quartiles of Beta(1,3)
      double u = 1.0 - std::pow(1.0 - r.low, n - 1);
      table[r.left - 1][std::min(3, static_cast<int>(u * 4.0))] += 1.0;
      if (!r.leaves_ok) ++bad_leaves;
    }
    auto ks = stats::ks_one_sample(low, [&](double x) { return 1.0 - std::pow(1.0 - std::clamp(x, 0.0, 1.0), n - 1); });
    rep.checks.push_back(p_check("lowest_branch_beta", ks.d, ks.p));
    auto chi = stats::chi2_test(obs, expv);
    rep.checks.push_back(p_check("left_count_uniform", chi.stat, chi.p, 0.01, {{"dof", chi.dof}}));
    auto ind = stats::chi2_independence(table);
    rep.checks.push_back(p_check("left_count_independent_of_height", ind.stat, ind.p, 0.01, {{"dof", ind.dof}}));
    rep.checks.push_back(count_check("leaves_at_height_t", bad_leaves, N));
  }
  {
    // skeleton given n-1 jumps against T_n
    const int n = 3;
    Intensity unit{1.0, 0.0};
    std::size_t M = mc_samples(20000, o);
    std::uint64_t s1 = sub_seed(o.seed, "skeleton-props/frakT"), s2 = sub_seed(o.seed, "skeleton-props/Tn");
    auto a = mc_collect<double>(o, M, s1, [&](RandomStream& rs) {
      FrakTSample f;
      do f = skeleton::sample_frakT(t, unit, rs);
      while (f.jumps != n - 1);
      return f.tree.total_length();
    });
    auto b = mc_collect<double>(
        o, M, s2, [&](RandomStream& rs) { return skeleton::sample_Tn(n, uni, t, rs).total_length(); });
    auto ks = stats::ks_two_sample(a, b);
    rep.checks.push_back(p_check("frakT_given_jumps_vs_Tn", ks.d, ks.p));
  }
  {
    Intensity f{1.5, 0.8};
    std::uint64_t seed = sub_seed(o.seed, "skeleton-props/jumps");
    auto acc = mc_mean(o, N, seed, [&](RandomStream& rs) {
      return static_cast<double>(skeleton::sample_frakT(t, f, rs).jumps);
    });
    rep.checks.push_back(mc_check("frakT_jump_mean", stats::make_report_exact(acc, f.cumulative(t), seed)));
  }
  {
    std::uint64_t seed = sub_seed(o.seed, "skeleton-props/L2");
    auto acc = mc_mean(o, N, seed, [&](RandomStream& rs) { return skeleton::sample_tn_sequence(2, rs).lengths[1]; });
    rep.checks.push_back(mc_check("tn_sequence_L2_mean", stats::make_report_exact(acc, 1.5, seed)));
  }
  {
    const int n = 3;
    std::uint64_t seed = sub_seed(o.seed, "skeleton-props/G1");
    auto r = skeleton::mc_test_graft_lemma(n, HeightDensity::moderate(1.0, 0.5, t), t, TreeStatistic::one,
                                           mc(o, 100000), seed);
    Check c = mc_check("graft_mass_mean", r);
    c.pass = c.pass && r.rhs == 0.5 * (n + 1);
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

SuiteReport suite_decorate_props(const Options& o) {
  SuiteReport rep;
  std::size_t N = mc_samples(100000, o);
  const double t = 1.0, eps = 0.05;
  {
    ModelParams p{1.0, 0.3, 0.0};
    double ce = analytics::c_t(p, eps);
    std::uint64_t seed = sub_seed(o.seed, "decorate-props/stubs");
    struct Row {
      double count, thinned;
      std::vector<double> survival;
    };
    const double eps2 = 0.2;
    auto rows = mc_collect<Row>(o, N, seed, [&](RandomStream& rs) {
      auto d = decorate::build_finite_decorated_tree(p, t, eps, rs);
      Row r{static_cast<double>(d.decorations.size()), 0.0, {}};
      for (const auto& rec : d.decorations) {
        r.survival.push_back(rec.survival);
        if (rec.survival > eps2) r.thinned += 1.0;
      }
      return r;
    });
    stats::Running cnt, thin;
    std::vector<double> surv;
    for (const auto& r : rows) {
      cnt.add(r.count);
      thin.add(r.thinned);
      if (surv.size() < N) surv.insert(surv.end(), r.survival.begin(), r.survival.end());
    }
    surv.resize(std::min(surv.size(), N));
    rep.checks.push_back(
        mc_check("stub_count_spine", stats::make_report_exact(cnt, 2.0 * p.beta * ce * t, seed)));
    rep.checks.push_back(mc_check("stub_count_thinning",
                                  stats::make_report_exact(thin, 2.0 * p.beta * analytics::c_t(p, eps2) * t, seed)));
    auto ks = stats::ks_one_sample(surv, [&](double h) { return h <= eps ? 0.0 : 1.0 - analytics::c_t(p, h) / ce; });
    rep.checks.push_back(p_check("stub_survival_law", ks.d, ks.p, 0.01, {{"n_samples", surv.size()}}));
  }
  {
    // with immigration the count given the backbone is Poisson(2 beta c_eps L)
    ModelParams p{1.0, 0.3, 1.0};
    double rate = 2.0 * p.beta * analytics::c_t(p, eps);
    std::uint64_t seed = sub_seed(o.seed, "decorate-props/stubs-backbone");
    auto acc = mc_mean(o, N, seed, [&](RandomStream& rs) {
      auto d = decorate::build_finite_decorated_tree(p, t, eps, rs);
      return static_cast<double>(d.decorations.size()) - rate * d.backbone.total_length();
    });
    rep.checks.push_back(mc_check("stub_count_backbone", stats::make_report_exact(acc, 0.0, seed)));
  }
  {
    // backbone with immigration stochastically dominates the bare spine
    double worst = 0.0;
    for (double theta : {-0.5, 0.0, 0.5})
      for (double alpha : {0.5, 2.0})
        for (double s : {0.5, 1.0, 3.0})
          for (double lam : {0.1, 1.0, 5.0}) {
            ModelParams p{1.0, theta, alpha};
            double gap = analytics::biased_laplace_poisson(p, s, lam) - analytics::biased_laplace_kesten(p, s, lam);
            worst = std::max(worst, gap);
          }
    rep.checks.push_back(tol_check("immigration_dominates_spine", worst, 0.0));
  }
  for (double theta : {0.0, 0.5, -0.5}) {
    ModelParams p{1.0, theta, 0.0};
    const double s = 1.0, lam = 1.0;
    std::uint64_t seed = sub_seed(o.seed, "decorate-props/kesten/" + plabel(p));
    auto acc = mc_means(o, N, seed, 2, [&](RandomStream& rs, double* v) {
      v[0] = std::exp(-lam * decorate::sample_kesten_Zs(p, s, rs));
      v[1] = std::exp(-lam * decorate::sample_kesten_Zs(p, s, rs, 0.5));
    });
    double rhs = analytics::biased_laplace_kesten(p, s, lam);
    rep.checks.push_back(mc_check("kesten_laplace_" + plabel(p), stats::make_report_exact(acc[0], rhs, seed)));
    rep.checks.push_back(
        mc_check("kesten_laplace_eps0.5_" + plabel(p), stats::make_report_exact(acc[1], rhs, seed)));
  }
  return rep;
}

}  // namespace csbp::verify::detail
