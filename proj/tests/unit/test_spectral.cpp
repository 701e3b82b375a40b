#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "isobandit/errors.hpp"
#include "isobandit/spectral.hpp"

using namespace isobandit;

namespace {

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> w;
  for (int i = 0; i < n; ++i) w.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return w;
}

double loglog_slope(const InfoGainCurve& c, int lo, int hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (std::size_t i = 0; i < c.n_values.size(); ++i) {
    if (c.n_values[i] < lo || c.n_values[i] > hi) continue;
    const double x = std::log(c.n_values[i]), y = std::log(c.gamma_hat[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("closed-form examples") {
    const std::vector<double> zero{0.0}, one{1.0};
    CHECK(radial_fourier(KernelSpec::square_exp(1.0), zero, 1).values[0] ==
          doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(radial_fourier(KernelSpec::matern(0.5, 1.0), one, 1).values[0] == doctest::Approx(1.0).epsilon(1e-14));
    // Lorentzian transform of exp(-|x|) at w = 1 through quadrature
    FourierOptions q;
    q.force_quadrature = true;
    CHECK(radial_fourier(KernelSpec::matern(0.5, 1.0), one, 1, q).values[0] == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("gamma-exp with gamma 2 is the SE transform") {
    const auto w = logspace(0.1, 10.0, 15);
    // gamma-exp uses exp(-(r/l)^gamma); l = sqrt(2) matches SE with l = 1
    const auto g = radial_fourier(KernelSpec::gamma_exp(2.0, std::numbers::sqrt2), w, 1);
    const auto s = radial_fourier(KernelSpec::square_exp(1.0), w, 1);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(g.values[i] - s.values[i]) <= 1e-10 + g.residuals[i]);
  }

  TEST_CASE("quadrature path agrees with closed forms on [0, 100]") {
    std::vector<double> w{0.0};
    for (auto v : logspace(0.05, 100.0, 30)) w.push_back(v);
    FourierOptions q;
    q.force_quadrature = true;
    for (const auto& spec : {KernelSpec::square_exp(0.5), KernelSpec::matern(0.5, 0.5), KernelSpec::matern(1.5, 0.5),
                             KernelSpec::matern(2.5, 1.0)}) {
      const auto a = radial_fourier(spec, w, 1);
      const auto b = radial_fourier(spec, w, 1, q);
      for (std::size_t i = 0; i < w.size(); ++i) CHECK_MESSAGE(std::abs(a.values[i] - b.values[i]) <= 1e-10, spec.describe());
    }
    for (const auto& spec : {KernelSpec::square_exp(0.5, 3), KernelSpec::matern(1.5, 0.5, 3)}) {
      const auto a = radial_fourier(spec, w, 3);
      const auto b = radial_fourier(spec, w, 3, q);
      for (std::size_t i = 0; i < w.size(); ++i) CHECK_MESSAGE(std::abs(a.values[i] - b.values[i]) <= 1e-10, spec.describe());
    }
  }

  TEST_CASE("unsupported quadrature dimension and bad grids") {
    CHECK_THROWS_AS(radial_fourier(KernelSpec::rational_quad(1.0, 1.0, 2), std::vector<double>{1.0}, 2), ConfigError);
    CHECK_THROWS(radial_fourier(KernelSpec::square_exp(), std::vector<double>{2.0, 1.0}, 1));
  }

  TEST_CASE("decay fits") {
    const auto w = logspace(10.0, 1000.0, 60);
    const auto m = fit_decay_slope(radial_fourier(KernelSpec::matern(1.5, 1.0), w, 1), 10.0);
    CHECK(m.verdict == DecayKind::Polynomial);
    CHECK(m.tau_hat == doctest::Approx(4.0).epsilon(0.15 / 4.0));
    const auto g = fit_decay_slope(radial_fourier(KernelSpec::gamma_exp(1.0, 1.0), w, 1), 10.0);
    CHECK(std::abs(g.tau_hat - 2.0) <= 0.2);
    std::vector<double> ws;
    for (double v = 1.0; v <= 40.0; v += 0.25) ws.push_back(v);
    CHECK(fit_decay_slope(radial_fourier(KernelSpec::square_exp(1.0), ws, 1), 1.0).verdict == DecayKind::Exponential);
    // closed-form Matern recovers 2 nu + d tightly far in the tail
    const auto far = logspace(1e3, 1e5, 60);
    for (double nu : {0.5, 1.5, 2.5, 0.8})
      for (int d : {1, 2, 3}) {
        const auto f = fit_decay_slope(radial_fourier(KernelSpec::matern(nu, 1.0, d), far, d), 1e3,
                                       std::numeric_limits<double>::infinity(), 0.0);
        CHECK(std::abs(f.tau_hat - (2.0 * nu + d)) <= 0.02);
      }
    FourierSamples few;
    few.omegas = {10.0, 11.0};
    few.values = {1.0, 0.5};
    few.residuals = {0.0, 0.0};
    CHECK_THROWS_AS(fit_decay_slope(few, 10.0), std::invalid_argument);
  }

  TEST_CASE("Nystrom examples") {
    const auto one = nystrom_eigs(KernelSpec::matern(1.5), 1, 1);
    REQUIRE(one.eigenvalues.size() == 1);
    CHECK(one.eigenvalues[0] == doctest::Approx(1.0));
    const auto pp = nystrom_eigs(KernelSpec::piecewise_poly(1, 1.0, 2), 2, 2);
    for (double v : pp.eigenvalues) CHECK(v == doctest::Approx(pp.cell_volume).epsilon(1e-14));
    CHECK(tail_mass(pp, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tail_mass(pp, 4) == 0.0);
    CHECK(tail_mass(pp, 10) == 0.0);
    CHECK_THROWS_AS(nystrom_eigs(KernelSpec::square_exp(), 17, 3), ConfigError);

    const auto est = nystrom_eigs(KernelSpec::matern(1.5, 1.0), 512, 1);
    for (std::size_t i = 1; i < est.eigenvalues.size(); ++i) CHECK(est.eigenvalues[i] <= est.eigenvalues[i - 1]);
    for (double v : est.eigenvalues) CHECK(v >= -1e-8);
    double prev = tail_mass(est, 0);
    for (std::size_t D = 1; D < 100; ++D) {
      const double t = tail_mass(est, D);
      CHECK(t <= prev);
      prev = t;
    }
    CHECK(std::abs(eigen_decay_slope(est, 5, 50) + 4.0) <= 0.5);
  }

  TEST_CASE("Nystrom spectrum is invariant to point labels") {
    // the Nystrom Gram matrix of a permuted grid has the same spectrum
    const Kernel k(KernelSpec::matern(0.5, 0.3));
    auto pts = uniform_grid(40, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(gram(k, pts) / 40.0);
    std::mt19937_64 g(1);
    std::shuffle(pts.begin(), pts.end(), g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b(gram(k, pts) / 40.0);
    CHECK((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12);
    const auto est = nystrom_eigs(KernelSpec::matern(0.5, 0.3), 40, 1);
    for (int i = 0; i < 40; ++i) CHECK(est.eigenvalues[i] == doctest::Approx(a.eigenvalues()[39 - i]).epsilon(1e-10));
  }

  TEST_CASE("information gain examples") {
    const double s2 = 0.5;
    const auto far = uniform_grid(6, 1);  // spacing 0.2, support 0.2 under l = 0.2
    const auto c = empirical_info_gain(KernelSpec::piecewise_poly(1, 0.2), s2, far, 6);
    for (std::size_t i = 0; i < c.gamma_hat.size(); ++i)
      CHECK(c.gamma_hat[i] == doctest::Approx(0.5 * (i + 1) * std::log(1.0 + 1.0 / s2)).epsilon(1e-12));
    const auto one = empirical_info_gain(KernelSpec::square_exp(0.3), s2, uniform_grid(50, 1), 1);
    CHECK(one.gamma_hat[0] == doctest::Approx(0.5 * std::log(1.0 + 1.0 / s2)).epsilon(1e-12));
    CHECK_THROWS(empirical_info_gain(KernelSpec::square_exp(), 1.0, uniform_grid(4, 1), 5));
    CHECK_THROWS(empirical_info_gain(KernelSpec::square_exp(), 0.0, uniform_grid(4, 1), 2));
  }

  TEST_CASE("greedy information gain is monotone and respects bounds") {
    const auto grid = uniform_grid(512, 1);
    const auto se = empirical_info_gain(KernelSpec::square_exp(0.2), 1.0, grid, 256);
    double ratio_max = 0.0, ratio_16 = 0.0;
    for (std::size_t i = 0; i < se.n_values.size(); ++i) {
      if (i > 0) CHECK(se.gamma_hat[i] >= se.gamma_hat[i - 1]);
      CHECK(se.gamma_hat[i] >= 0.0);
      const int n = se.n_values[i];
      if (n >= 16) {
        const double r = se.gamma_hat[i] / std::pow(std::log(n), 2);
        if (n == 16) ratio_16 = r;
        ratio_max = std::max(ratio_max, r);
      }
    }
    CHECK(ratio_max <= 1.2 * ratio_16);
    // improved-regime kernels: greedy slope below the bound's n-exponent
    for (const auto& spec : {KernelSpec::matern(1.5, 1.0), KernelSpec::matern(2.5, 1.0),
                             KernelSpec::piecewise_poly(1, 1.0), KernelSpec::gamma_exp(1.5, 1.0)}) {
      const auto e = info_gain_bound_exponent(spec);
      REQUIRE(e.improved_regime);
      const auto c = empirical_info_gain(spec, 1.0, grid, 256);
      for (std::size_t i = 1; i < c.gamma_hat.size(); ++i) CHECK(c.gamma_hat[i] >= c.gamma_hat[i - 1]);
      CHECK_MESSAGE(loglog_slope(c, 32, 256) <= e.n_exponent + 0.15, spec.describe());
    }
  }

  TEST_CASE("information gain bound exponents") {
    const auto m = info_gain_bound_exponent(KernelSpec::matern(2.0, 1.0, 2));
    CHECK(m.n_exponent == doctest::Approx(1.0 / 3.0));
    CHECK(m.improved_regime);
    const auto g = info_gain_bound_exponent(KernelSpec::gamma_exp(0.5, 1.0, 2));
    CHECK(g.n_exponent == 4.0);
    CHECK_FALSE(g.improved_regime);
    const auto d = info_gain_bound_exponent(KernelSpec::dirichlet(2));
    CHECK(d.n_exponent == 0.0);
    CHECK(d.log_exponent == 1.0);
    CHECK(info_gain_bound_exponent(KernelSpec::square_exp(1.0, 2)).log_exponent == 3.0);
    CHECK_FALSE(info_gain_bound_exponent(KernelSpec::piecewise_poly(0, 1.0, 2)).applicable);
    CHECK(info_gain_bound_exponent(KernelSpec::piecewise_poly(1, 1.0, 2)).improved_regime);
    CHECK(info_gain_bound_exponent(KernelSpec::matern(0.5, 1.0, 1)).improved_regime);
    CHECK_FALSE(info_gain_bound_exponent(KernelSpec::matern(0.5, 1.0, 2)).improved_regime);
  }

  TEST_CASE("uniform grid") {
    const auto g = uniform_grid(3, 2);
    REQUIRE(g.size() == 9);
    CHECK(g.front().isZero());
    CHECK(g.back().isOnes());
    CHECK(uniform_grid(1, 1)[0][0] == 0.5);
  }
}
