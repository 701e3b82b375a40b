#include "isobandit/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace isobandit {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;
constexpr double kEuler = 0.57721566490153286061;

// gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl,
                  double& gammi) {
  gampl = 1.0 / std::tgamma(1.0 + mu);
  gammi = 1.0 / std::tgamma(1.0 - mu);
  gam2 = 0.5 * (gammi + gampl);
  if (std::abs(mu) < 0.05) {
    // Odd Taylor coefficients of 1/Gamma(1+z).
    const double mu2 = mu * mu;
    gam1 = -(kEuler + mu2 * (-0.0420026350340952355 +
                             mu2 * (-0.0421977345555443367 +
                                    mu2 * 0.0072189432466630995)));
  } else {
    gam1 = (gammi - gampl) / (2.0 * mu);
  }
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, scaled by exp(x) when requested.
void reduced_order_k(double mu, double x, bool scaled, double& kmu,
                     double& kmu1) {
  if (x < 2.0) {
    const double half_x = 0.5 * x;
    const double pimu = std::numbers::pi * mu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(half_x);
    double e = mu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double gam1 = 0, gam2 = 0, gampl = 0, gammi = 0;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = half_x * half_x;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
      ff = (i * ff + p + q) / (static_cast<double>(i) * i - mu * mu);
      c *= d / i;
      p /= (i - mu);
      q /= (i + mu);
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter) throw std::runtime_error("bessel_k: series failed to converge");
    kmu = sum;
    kmu1 = sum1 * (2.0 / x);
    if (scaled) {
      const double ex = std::exp(x);
      kmu *= ex;
      kmu1 *= ex;
    }
    return;
  }

  // Steed's algorithm for CF2 with Temme's normalization.
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i <= kMaxIter; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i > kMaxIter) throw std::runtime_error("bessel_k: CF2 failed to converge");
  h = a1 * h;
  kmu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  if (!scaled) kmu *= std::exp(-x);
  kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

double bessel_k_impl(double nu, double x, bool scaled) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw std::domain_error("bessel_k: order must be finite and >= 0");
  if (!(x > 0.0) || std::isnan(x)) throw std::domain_error("bessel_k: argument must be > 0");
  if (std::isinf(x)) return 0.0;
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  double kmu = 0, kmu1 = 0;
  reduced_order_k(mu, x, scaled, kmu, kmu1);
  const double two_over_x = 2.0 / x;
  for (int i = 1; i <= nl; ++i) {
    const double next = (mu + i) * two_over_x * kmu1 + kmu;
    kmu = kmu1;
    kmu1 = next;
  }
  return kmu;
}

}  // namespace

double bessel_k(double nu, double x) { return bessel_k_impl(nu, x, false); }

double bessel_k_scaled(double nu, double x) { return bessel_k_impl(nu, x, true); }

}  // namespace isobandit
