#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "isobandit/algorithms.hpp"
#include "isobandit/errors.hpp"

using namespace isobandit;

namespace {

RkhsFunction zero_function(const KernelSpec& k) {
  return RkhsFunction(k, {Point::Constant(k.dim, 0.5)}, {0.0});
}

LpGpUcbConfig config_for(const KernelSpec& k, int n, double B, double sigma, std::uint64_t seed) {
  SmoothnessParams sm = holder_params(k, 1.0);
  sm.L = default_smoothness_constant(Kernel(k), B, sm);
  LpGpUcbConfig c = LpGpUcbConfig::from_smoothness(sm, n, B, sigma, 0.05);
  c.gamma = std::make_shared<const InfoGainSchedule>(InfoGainSchedule::for_kernel(k));
  c.seed = seed;
  return c;
}

// Replays the invariants every LP-GP-UCB trace must satisfy.
void check_lp_gp_trace(const RegretTrace& tr, int n, const LpGpUcbConfig& cfg) {
  CHECK(tr.query_count() == static_cast<std::size_t>(n));
  std::map<int, double> last_u0;
  int queries = 0;
  for (const auto& row : tr.rows) {
    const auto& u = row.ucb;
    double expect = u.u0;
    if (!std::isnan(u.u1)) expect = std::min(expect, u.u1);
    if (!std::isnan(u.u2)) expect = std::min(expect, u.u2);
    CHECK(u.overall == expect);
    CHECK(u.overall <= u.u0);
    const double u1 = row.mean + row.beta * row.std + cfg.L * std::pow(std::sqrt(tr.dim) * row.cell_side, cfg.alpha1());
    CHECK(std::abs(u.u1 - u1) <= 1e-10 * std::max(1.0, std::abs(u1)));
    if (cfg.min_pts_lp == LpGpUcbConfig::kLpDisabled) {
      CHECK(std::isnan(u.u2));
      CHECK(u.u2_source == U2Source::None);
    }
    const auto it = last_u0.find(row.cell_id);
    if (it != last_u0.end()) CHECK(u.u0 <= it->second);
    last_u0[row.cell_id] = u.u0;
    if (row.decision == Decision::Sample) ++queries;
    CHECK(row.step == queries);
  }
  const auto per = tr.per_step_regret();
  const auto cum = tr.cum_regret();
  REQUIRE(per.size() == cum.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < per.size(); ++i) {
    acc += per[i];
    CHECK(cum[i] == doctest::Approx(acc).epsilon(1e-12));
  }
}

}  // namespace

TEST_SUITE("algorithms") {
  TEST_CASE("beta schedule") {
    CHECK(beta_n(BetaSchedule::fixed(2.0), 17, 1.0, 1.0, 3.0, 0.1) == 2.0);
    CHECK(beta_n(BetaSchedule::theoretical(), 1, 1.0, 1.0, 0.0, std::exp(-1.0)) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS_AS(beta_n(BetaSchedule::theoretical(), 0, 1.0, 1.0, 0.0, 0.1), ConfigError);
    const auto sched = InfoGainSchedule::for_kernel(KernelSpec::matern(1.5, 0.3));
    double prev = 0.0;
    for (int t = 1; t <= 5000; t += 7) {
      const double b = beta_n(BetaSchedule::theoretical(), t, 2.0, 0.1, sched.at(t), 0.05);
      CHECK(b >= prev);
      prev = b;
    }
  }

  TEST_CASE("information-gain schedule extends its curve") {
    InfoGainCurve c;
    for (int n = 1; n <= 64; ++n) {
      c.n_values.push_back(n);
      c.gamma_hat.push_back(std::sqrt(static_cast<double>(n)));
    }
    const InfoGainSchedule s(c);
    CHECK(s.at(16) == 4.0);
    CHECK(s.at(256) == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(s.at(0) == 0.0);
  }

  TEST_CASE("Holder constants bound sampled functions") {
    for (const auto& k : {KernelSpec::matern(0.5, 0.2), KernelSpec::matern(1.5, 0.2), KernelSpec::square_exp(0.2)}) {
      const auto sm = holder_params(k, 1.0);
      const double L = default_holder_constant(Kernel(k), 2.0, sm.alpha1);
      const auto f = sample_rkhs_function(k, 2.0, 30, 3, 256);
      std::mt19937_64 g(1);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int i = 0; i < 2000; ++i) {
        Point x(1), y(1);
        x << u(g);
        y << std::clamp(x[0] + 0.05 * (u(g) - 0.5), 0.0, 1.0);
        const double r = std::abs(x[0] - y[0]);
        if (r == 0.0) continue;
        CHECK(std::abs(f(x) - f(y)) <= L * std::pow(r, sm.alpha1) * (1.0 + 1e-9));
      }
      CHECK(default_smoothness_constant(Kernel(k), 2.0, sm) >= L);
    }
  }

  TEST_CASE("LP-GP-UCB single step and zero function") {
    const KernelSpec k = KernelSpec::matern(0.5, 0.2);
    auto cfg = config_for(k, 1, 2.0, 0.1, 1);
    BanditOracle o1(sample_rkhs_function(k, 2.0, 5, 1, 512), NoiseModel::gaussian(0.1), 1);
    const auto one = run_lp_gp_ucb(o1, k, cfg);
    REQUIRE(one.query_count() == 1);
    CHECK(one.rows.front().cell_id == 0);
    // with a small Holder constant the root is sampled without splitting
    auto calm = cfg;
    calm.L = 0.1;
    BanditOracle o2(sample_rkhs_function(k, 2.0, 5, 1, 512), NoiseModel::gaussian(0.1), 1);
    const auto root = run_lp_gp_ucb(o2, k, calm);
    REQUIRE(root.rows.size() == 1);
    CHECK(root.rows[0].cell_id == 0);
    CHECK(root.rows[0].decision == Decision::Sample);

    cfg.n = 200;
    BanditOracle o0(zero_function(k), NoiseModel::gaussian(0.0), 2);
    const auto z = run_lp_gp_ucb(o0, k, cfg);
    for (double r : z.per_step_regret()) CHECK(r == 0.0);
  }

  TEST_CASE("LP-GP-UCB invariants across kernels") {
    for (const auto& k : {KernelSpec::matern(0.5, 0.2), KernelSpec::square_exp(0.2), KernelSpec::matern(1.5, 0.3, 2)}) {
      const int n = k.dim == 1 ? 400 : 200;
      for (std::uint64_t seed : {1, 2}) {
        auto cfg = config_for(k, n, 2.0, 0.1, seed);
        BanditOracle o(sample_rkhs_function(k, 2.0, 20, seed, 256), NoiseModel::gaussian(0.1), seed);
        const auto tr = run_lp_gp_ucb(o, k, cfg);
        check_lp_gp_trace(tr, n, cfg);
        CHECK(o.query_count() == static_cast<std::size_t>(n));
      }
    }
  }

  TEST_CASE("LP-GP-UCB degradation without the local-polynomial bound") {
    const KernelSpec k = KernelSpec::matern(1.5, 0.2);
    auto cfg = config_for(k, 300, 2.0, 0.1, 3);
    cfg.min_pts_lp = LpGpUcbConfig::kLpDisabled;
    BanditOracle o(sample_rkhs_function(k, 2.0, 20, 3, 512), NoiseModel::gaussian(0.1), 3);
    check_lp_gp_trace(run_lp_gp_ucb(o, k, cfg), 300, cfg);
  }

  TEST_CASE("LP-GP-UCB determinism and config errors") {
    const KernelSpec k = KernelSpec::square_exp(0.2);
    auto cfg = config_for(k, 150, 2.0, 0.1, 4);
    const auto f = sample_rkhs_function(k, 2.0, 20, 4, 512);
    BanditOracle a(f, NoiseModel::gaussian(0.1), 4), b(f, NoiseModel::gaussian(0.1), 4);
    std::ostringstream sa, sb;
    run_lp_gp_ucb(a, k, cfg).write_csv(sa);
    run_lp_gp_ucb(b, k, cfg).write_csv(sb);
    CHECK(sa.str() == sb.str());
    auto bad = cfg;
    bad.gamma.reset();
    BanditOracle c(f, NoiseModel::gaussian(0.1), 4);
    CHECK_THROWS_AS(run_lp_gp_ucb(c, k, bad), ConfigError);
    bad = cfg;
    bad.s = 0.0;
    CHECK_THROWS_AS(run_lp_gp_ucb(c, k, bad), ConfigError);
    auto fixed = cfg;
    fixed.beta_schedule = BetaSchedule::fixed(2.0);
    fixed.gamma.reset();
    CHECK_NOTHROW(run_lp_gp_ucb(c, k, fixed));
  }

  TEST_CASE("LP-GP-UCB uses the local polynomial once cells fill") {
    const KernelSpec k = KernelSpec::matern(0.5, 0.2);
    auto cfg = config_for(k, 1500, 2.0, 0.1, 5);
    BanditOracle o(sample_rkhs_function(k, 2.0, 30, 5, 4096), NoiseModel::gaussian(0.1), 5);
    const auto tr = run_lp_gp_ucb(o, k, cfg);
    int lp = 0, mean = 0;
    for (const auto& r : tr.rows) {
      lp += r.ucb.u2_source == U2Source::LocalPoly;
      mean += r.ucb.u2_source == U2Source::CellMean;
    }
    CHECK(lp > 0);
    CHECK(mean > 0);
  }

  TEST_CASE("GP-UCB") {
    const KernelSpec k = KernelSpec::square_exp(0.2);
    const auto grid = uniform_grid(64, 1);
    BanditOracle o(sample_rkhs_function(k, 2.0, 10, 1, 512), NoiseModel::gaussian(0.1), 1);
    const auto one = run_gp_ucb(o, k, 1, 2.0, 0.1, BetaSchedule::theoretical(), grid);
    REQUIRE(one.rows.size() == 1);
    CHECK(one.rows[0].cell_id == 0);
    CHECK(one.rows[0].x[0] == 0.0);

    // noiseless single bump: regret flattens
    const RkhsFunction bump(k, {Point::Constant(1, 0.3)}, {1.0});
    BanditOracle ob(bump, NoiseModel::gaussian(0.0), 2);
    const auto tr = run_gp_ucb(ob, k, 300, 1.0, 0.0, BetaSchedule::fixed(2.0), grid);
    const auto cum = tr.cum_regret();
    CHECK(cum[299] - cum[149] <= 0.1 * cum[149] + 1e-9);
    for (const auto& r : tr.rows) CHECK(r.ucb.overall == doctest::Approx(r.mean + r.beta * r.std).epsilon(1e-12));
    CHECK_THROWS_AS(run_gp_ucb(ob, k, 3, 1.0, 0.0, BetaSchedule::fixed(2.0), PointList{}), ConfigError);
  }

  TEST_CASE("local-poly-UCB") {
    CHECK(phase_sample_count(0.1, 1.0, 0.5, 1, 0.5, 0.05) ==
          static_cast<std::size_t>(std::ceil(std::pow(0.1 / std::pow(0.5, 0.5), 2) * 2 * std::log(40.0))));
    CHECK(phase_sample_count(0.2, 2.0, 0.25, 2, 1.0, 0.01) ==
          static_cast<std::size_t>(std::ceil(std::pow(0.2 / (2.0 * std::sqrt(2.0) * 0.25), 2) * 2 * std::log(200.0))));

    SmoothnessParams sm = holder_params(KernelSpec::matern(0.5, 0.2), 1.0);
    const KernelSpec k = KernelSpec::matern(0.5, 0.2);
    BanditOracle o0(zero_function(k), NoiseModel::gaussian(0.0), 1);
    const auto z = run_local_poly_ucb(o0, sm, 300, 0.0, 0.05, 1);
    CHECK(z.query_count() == 300);
    for (double r : z.per_step_regret()) CHECK(r == 0.0);

    for (const auto& kk : {k, KernelSpec::matern(1.5, 0.2), KernelSpec::matern(0.5, 0.3, 2)}) {
      SmoothnessParams s = holder_params(kk, 1.0);
      s.L = default_smoothness_constant(Kernel(kk), 2.0, s);
      BanditOracle o(sample_rkhs_function(kk, 2.0, 20, 2, 256), NoiseModel::gaussian(0.1), 2);
      const auto tr = run_local_poly_ucb(o, s, 500, 0.1, 0.05, 2);
      CHECK(tr.query_count() == 500);
      CHECK(o.query_count() == 500);
    }
  }

  TEST_CASE("uniform baseline") {
    const KernelSpec k = KernelSpec::matern(0.5, 0.2);
    BanditOracle z(zero_function(k), NoiseModel::gaussian(0.1), 1);
    for (double r : run_uniform(z, 100, 1).per_step_regret()) CHECK(r == 0.0);
    const auto f = sample_rkhs_function(k, 2.0, 20, 3, 512);
    BanditOracle a(f, NoiseModel::gaussian(0.1), 3), b(f, NoiseModel::gaussian(0.1), 3);
    const auto ta = run_uniform(a, 2000, 7), tb = run_uniform(b, 2000, 7);
    CHECK(ta.cum_regret() == tb.cum_regret());
    const auto c = ta.cum_regret();
    const double slope = std::log(c[1999] / c[124]) / std::log(16.0);
    CHECK(slope == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("trace CSV layout") {
    const KernelSpec k = KernelSpec::matern(0.5, 0.2, 2);
    BanditOracle o(sample_rkhs_function(k, 1.0, 5, 1, 32), NoiseModel::gaussian(0.1), 1);
    const auto tr = run_uniform(o, 3, 1);
    std::ostringstream os;
    tr.write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "# schema=1");
    std::getline(is, line);
    CHECK(line.rfind("# algorithm=uniform", 0) == 0);
    std::getline(is, line);
    CHECK(line == "step,cell_id,decision,x0,x1,y,inst_regret,cum_regret,u0,u1,u2,overall");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3);
    CHECK(parse_algorithm("lp-gp-ucb") == Algorithm::LpGpUcb);
    CHECK(to_string(Algorithm::LocalPolyUcb) == "local-poly-ucb");
    CHECK_THROWS_AS(parse_algorithm("thompson"), ConfigError);
  }
}
