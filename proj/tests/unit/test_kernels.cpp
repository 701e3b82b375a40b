#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "isobandit/bessel.hpp"
#include "isobandit/errors.hpp"
#include "isobandit/kernels.hpp"

using namespace isobandit;

namespace {

// Wendland's recursion: phi_{l,0} = (1 - r)^l, phi_{l,k+1}(r) = int_r^1 t phi_{l,k}(t) dt,
// carried out on monomial coefficients and normalized to 1 at r = 0.
std::vector<double> wendland_oracle(int q, int d) {
  const int l = d / 2 + q + 1;
  std::vector<double> c(l + 1, 0.0);
  for (int i = 0; i <= l; ++i) c[i] = std::tgamma(l + 1.0) / (std::tgamma(i + 1.0) * std::tgamma(l - i + 1.0)) * ((i % 2) ? -1.0 : 1.0);
  for (int k = 0; k < q; ++k) {
    // antiderivative of t p(t), then F(1) - F(r)
    std::vector<double> F(c.size() + 2, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) F[i + 2] = c[i] / static_cast<double>(i + 2);
    double F1 = 0.0;
    for (double v : F) F1 += v;
    for (auto& v : F) v = -v;
    F[0] += F1;
    c = F;
  }
  const double c0 = c[0];
  for (auto& v : c) v /= c0;
  return c;
}

std::vector<KernelSpec> all_specs(int d) {
  std::vector<KernelSpec> out = {KernelSpec::matern(0.5, 0.3, d),   KernelSpec::matern(1.5, 0.5, d),
                                 KernelSpec::matern(0.8, 0.4, d),   KernelSpec::matern(2.5, 0.3, d),
                                 KernelSpec::square_exp(0.3, d),    KernelSpec::rational_quad(2.0, 0.4, d),
                                 KernelSpec::gamma_exp(0.5, 0.3, d), KernelSpec::gamma_exp(1.5, 0.3, d),
                                 KernelSpec::piecewise_poly(0, 0.7, d), KernelSpec::piecewise_poly(1, 0.7, d),
                                 KernelSpec::piecewise_poly(2, 0.7, d), KernelSpec::piecewise_poly(3, 0.7, d)};
  if (d == 1) out.push_back(KernelSpec::dirichlet(2, 0.5));
  return out;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("evaluation examples") {
    CHECK(Kernel(KernelSpec::square_exp(1.0))(1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(Kernel(KernelSpec::matern(0.5, 1.0))(2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    for (int q = 0; q <= 3; ++q) CHECK(Kernel(KernelSpec::piecewise_poly(q, 1.0))(1.5) == 0.0);
    CHECK(Kernel(KernelSpec::dirichlet(2, 1.0))(0.0) == 1.0);
    Eigen::VectorXd x0(2), x1(2);
    x0 << 0.0, 0.0;
    x1 << 1.0, 1.0;
    CHECK(Kernel(KernelSpec::square_exp(1.0, 2))(x0, x1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    Eigen::VectorXd a(1), b(1);
    a << 0.0;
    b << 1.0;
    const double s3 = std::sqrt(3.0);
    CHECK(Kernel(KernelSpec::matern(1.5, 1.0))(a, b) == doctest::Approx((1.0 + s3) * std::exp(-s3)).epsilon(1e-13));
    CHECK_THROWS_AS(Kernel(KernelSpec::square_exp(1.0))(-1.0), std::domain_error);
    CHECK_THROWS_AS(Kernel(KernelSpec::square_exp(1.0))(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(Kernel(KernelSpec::square_exp(1.0, 2))(a, x0), std::invalid_argument);
  }

  TEST_CASE("Matern general-order Bessel path against closed forms") {
    // nu slightly off the half integer forces the numeric K_nu path.
    const Kernel k05(KernelSpec::matern(0.5 + 1e-12, 1.0)), k15(KernelSpec::matern(1.5 + 1e-12, 1.0));
    const double s3 = std::sqrt(3.0);
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double r = 1e-6 * std::pow(1e7, i / 400.0);
      worst = std::max(worst, std::abs(k05(r) - std::exp(-r)));
      worst = std::max(worst, std::abs(k15(r) - (1.0 + s3 * r) * std::exp(-s3 * r)));
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("bessel_k against std::cyl_bessel_k") {
    double worst = 0.0;
    for (double nu : {0.0, 0.3, 0.5, 1.0, 1.7, 2.5, 4.2, 7.0})
      for (double x : {1e-3, 0.1, 0.9, 1.99, 2.01, 5.0, 9.9, 10.1, 30.0, 200.0}) {
        const double ref = std::cyl_bessel_k(nu, x);
        worst = std::max(worst, std::abs(bessel_k(nu, x) - ref) / ref);
      }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("normalization, symmetry and compact support") {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int d = 1; d <= 3; ++d)
      for (const auto& spec : all_specs(d)) {
        const Kernel k(spec);
        CHECK(k(0.0) == doctest::Approx(1.0).epsilon(1e-14));
        Eigen::VectorXd x(d), y(d);
        for (int i = 0; i < d; ++i) {
          x[i] = u(g);
          y[i] = u(g);
        }
        CHECK(k(x, y) == k(y, x));
        if (spec.family == KernelFamily::PiecewisePoly) {
          for (double r : {0.7, 0.8, 1.0, 3.0}) CHECK(k(r) == doctest::Approx(0.0).epsilon(1e-300));
        }
      }
  }

  TEST_CASE("isotropy under shifts") {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    for (const auto& spec : all_specs(2)) {
      const Kernel k(spec);
      // shifts by multiples of 1/8 are exact in binary
      Eigen::VectorXd x(2), y(2), c(2);
      x << std::ldexp(std::floor(u(g) * 256), -9), std::ldexp(std::floor(u(g) * 256), -9);
      y << std::ldexp(std::floor(u(g) * 256), -9), std::ldexp(std::floor(u(g) * 256), -9);
      c << 0.25, 0.375;
      CHECK(k(x, y) == k(Eigen::VectorXd(x + c), Eigen::VectorXd(y + c)));
    }
  }

  TEST_CASE("Gram matrices are positive semidefinite") {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> sz(2, 20);
    int sets = 0;
    for (int d = 1; d <= 3; ++d)
      for (const auto& spec : all_specs(d))
        for (int rep = 0; rep < 4; ++rep, ++sets) {
          PointList pts(sz(g), Eigen::VectorXd(d));
          for (auto& p : pts)
            for (int i = 0; i < d; ++i) p[i] = u(g);
          const Eigen::MatrixXd G = gram(Kernel(spec), pts);
          CHECK((G - G.transpose()).norm() == 0.0);
          const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().minCoeff();
          CHECK(lmin >= -1e-8);
        }
    CHECK(sets >= 50);
  }

  TEST_CASE("Gram examples") {
    Eigen::VectorXd p(1);
    p << 0.3;
    CHECK(gram(Kernel(KernelSpec::square_exp()), PointList{p}) == Eigen::MatrixXd::Ones(1, 1));
    Eigen::VectorXd a(1), b(1), c(1);
    a << 0.0;
    b << 1.0;
    c << 0.5;
    const Eigen::MatrixXd I = gram(Kernel(KernelSpec::piecewise_poly(1, 1.0)), PointList{a, b});
    CHECK(I == Eigen::MatrixXd::Identity(2, 2));
    const Eigen::MatrixXd G = gram(Kernel(KernelSpec::square_exp(1.0)), PointList{a, c, b});
    CHECK(G(0, 1) == doctest::Approx(std::exp(-0.125)).epsilon(1e-14));
    CHECK(G(0, 2) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(gram(Kernel(KernelSpec::square_exp()), PointList{}).size() == 0);
  }

  TEST_CASE("monotone decay on [0, inf)") {
    for (const auto& spec : all_specs(1)) {
      if (spec.family == KernelFamily::Dirichlet) continue;
      const Kernel k(spec);
      double prev = k(0.0);
      for (int i = 1; i <= 10000; ++i) {
        const double v = k(5.0 * i / 10000.0);
        CHECK_MESSAGE(v <= prev, spec.describe());
        prev = v;
      }
    }
  }

  TEST_CASE("decay classes") {
    CHECK(decay_class(KernelSpec::matern(1.0, 1.0, 2)).tau == 4.0);
    CHECK(decay_class(KernelSpec::gamma_exp(1.5, 1.0, 1)).tau == 2.5);
    CHECK(decay_class(KernelSpec::rational_quad(2.0)).kind == DecayKind::Exponential);
    CHECK(decay_class(KernelSpec::square_exp()).kind == DecayKind::Exponential);
    CHECK(decay_class(KernelSpec::dirichlet(3)).kind == DecayKind::CompactSupport);
    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int i = 0; i < 20; ++i) {
      const int d = 1 + i % 3;
      const double nu = 4.0 * u(g), gam = 2.0 * u(g);
      const int q = i % 4;
      const auto m = decay_class(KernelSpec::matern(nu, 1.0, d));
      CHECK(m.kind == DecayKind::Polynomial);
      CHECK(m.tau == 2.0 * nu + d);
      CHECK(m.beta == 2.0 * nu);
      CHECK(m.tau > d / 2.0);
      CHECK(decay_class(KernelSpec::gamma_exp(gam, 1.0, d)).tau == gam + d);
      CHECK(decay_class(KernelSpec::piecewise_poly(q, 1.0, d)).tau == 2.0 * q + 1.0 + d);
    }
  }

  TEST_CASE("Holder parameters") {
    const auto m = holder_params(KernelSpec::matern(1.5), 1.0);
    CHECK(m.alpha == 1.5);
    CHECK(m.q == 1);
    CHECK(m.s == 0.5);
    CHECK(m.alpha1 == 1.0);
    const auto g = holder_params(KernelSpec::gamma_exp(1.0), 1.0);
    CHECK(g.alpha == 0.5);
    CHECK(g.q == 0);
    CHECK(g.s == 0.5);
    CHECK(g.alpha1 == 0.5);
    CHECK(holder_params(KernelSpec::piecewise_poly(1), 1.0).alpha == 1.5);
    const auto se = holder_params(KernelSpec::square_exp(), 2.0, 2.0);
    CHECK(se.capped);
    CHECK(se.alpha == 2.0);
    CHECK(se.q == 1);
    CHECK(se.s == 1.0);
    CHECK(se.L == 2.0);
    for (double a : {0.1, 0.5, 1.0, 1.2, 2.0, 2.7, 3.0}) {
      const auto p = smoothness_from_alpha(a, 1.0);
      CHECK(p.q == static_cast<int>(std::ceil(a)) - 1);
      CHECK(p.s == doctest::Approx(a - p.q));
      CHECK(p.alpha1 == std::max(p.s, std::min(1.0, static_cast<double>(p.q))));
      CHECK(p.alpha1 > 0.0);
      CHECK(p.alpha1 <= 1.0);
    }
  }

  TEST_CASE("piecewise-polynomial coefficients match the Wendland recursion") {
    const auto p03 = pp_polynomial(0, 3);
    REQUIRE(p03.coeffs.size() == 3);
    CHECK(p03.coeffs[0] == 1.0);
    CHECK(p03.coeffs[1] == -2.0);
    CHECK(p03.coeffs[2] == 1.0);
    for (int d = 1; d <= 3; ++d)
      for (int q = 0; q <= 3; ++q) {
        const auto pp = pp_polynomial(q, d);
        const auto ref = wendland_oracle(q, d);
        REQUIRE(pp.coeffs.size() == ref.size());
        CHECK(pp.degree == d / 2 + 3 * q + 1);
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(pp.coeffs[i] == doctest::Approx(ref[i]).epsilon(1e-11));
        CHECK(pp.root_multiplicity >= q + 1);
        CHECK(pp.lower_bound_unavailable == (q == 0 && d <= 2));
        // (1-r)^4 (4r+1) for q = 1, d = 3
        if (q == 1 && d == 3) {
          const Kernel k(KernelSpec::piecewise_poly(1, 1.0, 3));
          for (double r : {0.1, 0.4, 0.9}) CHECK(k(r) == doctest::Approx(std::pow(1 - r, 4) * (4 * r + 1)).epsilon(1e-13));
        }
      }
    CHECK_THROWS_AS(pp_polynomial(4, 1), ConfigError);
  }

  TEST_CASE("validation") {
    KernelSpec d2 = KernelSpec::dirichlet(2);
    d2.dim = 2;
    CHECK_THROWS_AS(d2.validate(), ConfigError);
    CHECK_THROWS_AS(Kernel{d2}, ConfigError);
    CHECK_THROWS_AS(KernelSpec::gamma_exp(2.5).validate(), ConfigError);
    CHECK_THROWS_AS(KernelSpec::matern(-1.0).validate(), ConfigError);
    CHECK_THROWS_AS(KernelSpec::square_exp(0.0).validate(), ConfigError);
    CHECK_THROWS_AS(KernelSpec::piecewise_poly(4).validate(), ConfigError);
    CHECK_NOTHROW(KernelSpec::dirichlet(2).validate());
    CHECK(parse_family("se") == KernelFamily::SquareExp);
    CHECK(parse_family("gamma-exp") == KernelFamily::GammaExp);
    CHECK_THROWS_AS(parse_family("cosine"), ConfigError);
  }
}
