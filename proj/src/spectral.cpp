#include "isobandit/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "isobandit/errors.hpp"

namespace isobandit {
namespace {

using std::numbers::pi;

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Fixed 31-point Kronrod rule with |K31 - G15| as the error estimate,
// bisected until the estimate drops below 1e-13 of the panel's L1 mass.
// Boost reports the non-adaptive error on the reference interval [-1, 1],
// so it is rescaled by the half-width here.
template <class F>
Integral gauss_kronrod(F&& f, double a, double b, int depth = 0) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0;
  double l1 = 0.0;
  const double v = Rule::integrate(f, a, b, 0, 0.0, &err, &l1);
  err *= 0.5 * (b - a);
  if (err <= 1e-13 * l1 || err < 1e-300 || depth >= 16) return {v, err};
  const double mid = 0.5 * (a + b);
  const auto left = gauss_kronrod(f, a, mid, depth + 1);
  const auto right = gauss_kronrod(f, mid, b, depth + 1);
  return {left.value + right.value, left.error + right.error};
}

// Wynn's epsilon algorithm on a sequence of partial sums; returns the
// highest-order even-column estimate.
double wynn_epsilon(const std::vector<double>& sums) {
  const std::size_t n = sums.size();
  std::vector<double> prev(n + 1, 0.0);
  std::vector<double> cur(sums.begin(), sums.end());
  double best = sums.back();
  for (std::size_t col = 1; cur.size() > 1; ++col) {
    std::vector<double> next(cur.size() - 1);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const double diff = cur[i + 1] - cur[i];
      if (diff == 0.0) return cur[i + 1];
      next[i] = prev[i + 1] + 1.0 / diff;
    }
    prev.assign(cur.begin(), cur.end());
    cur = std::move(next);
    if (col % 2 == 0 && !cur.empty()) best = cur.back();
  }
  return best;
}

enum class Trig { Cos, Sin, None };

// int_0^inf g(r) * trig(w r) dr for a profile g that is negligible beyond
// `reach` and eventually monotone beyond `monotone_from`.
template <class G>
Integral oscillatory_integral(G&& g, double omega, Trig trig, double reach, double monotone_from,
                              double scale) {
  auto integrand = [&](double r) {
    switch (trig) {
      case Trig::Cos: return g(r) * std::cos(omega * r);
      case Trig::Sin: return g(r) * std::sin(omega * r);
      case Trig::None: break;
    }
    return g(r);
  };
  CompensatedSum total;
  double err = 0.0;

  // First piece through r = u^2, which smooths r^gamma cusps at the origin.
  const double half = omega > 0.0 ? pi / omega : std::numeric_limits<double>::infinity();
  double first = trig == Trig::Cos ? 0.5 * half : half;
  first = std::min({first, scale, reach});
  {
    auto sub = [&](double u) { return 2.0 * u * integrand(u * u); };
    const auto piece = gauss_kronrod(sub, 0.0, std::sqrt(first));
    total.add(piece.value);
    err += piece.error;
  }
  if (first >= reach) return {total.value(), err};

  // Non-oscillatory stretch (or half-periods longer than the profile scale):
  // geometric pieces.
  double a = first;
  if (half > scale) {
    double next_zero = trig == Trig::Cos ? 0.5 * half : half;
    while (next_zero < a + 1e-15 * half) next_zero += half;
    const double stop = std::min(reach, next_zero);
    double width = scale;
    while (a < stop) {
      const double b = std::min(stop, a + width);
      const auto piece = gauss_kronrod(integrand, a, b);
      total.add(piece.value);
      err += piece.error;
      a = b;
      width *= 2.0;
    }
    if (a >= reach || trig == Trig::None) return {total.value(), err};
  }

  // Half-period panels between consecutive zeros of the trigonometric factor,
  // integrated in the local offset s = r - zero so that the phase is never
  // formed from a large omega * r.
  const double offset = trig == Trig::Cos ? 0.5 * half : 0.0;
  const bool accelerate = (reach - a) / half > 20000.0;
  std::vector<double> tail_sums;
  double previous_estimate = std::numeric_limits<double>::quiet_NaN();
  double mass = 0.0;
  int settled = 0;
  for (long k = std::lround((a - offset) / half);; ++k) {
    const double lo = offset + static_cast<double>(k) * half;
    if (lo >= reach) break;
    const double width = std::min(half, reach - lo);
    const double parity = (k % 2 == 0) ? 1.0 : -1.0;
    const double sign = trig == Trig::Cos ? -parity : parity;
    auto local = [&](double s) { return sign * g(lo + s) * std::sin(omega * s); };
    const auto piece = gauss_kronrod(local, 0.0, width);
    total.add(piece.value);
    err += piece.error;
    mass += std::abs(piece.value);
    if (accelerate && lo > monotone_from) {
      tail_sums.push_back(total.value());
      if (tail_sums.size() > 24) tail_sums.erase(tail_sums.begin());
      if (tail_sums.size() >= 8) {
        const double estimate = wynn_epsilon(tail_sums);
        const double change = std::abs(estimate - previous_estimate);
        const double floor = 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(estimate) + mass);
        settled = change <= floor ? settled + 1 : 0;
        previous_estimate = estimate;
        if (settled >= 3) return {estimate, err + change};
      }
    }
  }
  // Truncation beyond reach: at most one half-period of the residual profile.
  err += std::abs(g(reach)) * half;
  return {total.value(), err};
}

double closed_form_se(double l, int d, double omega) {
  return std::pow(2.0 * pi * l * l, 0.5 * d) * std::exp(-0.5 * l * l * omega * omega);
}

double closed_form_matern(double nu, double l, int d, double omega) {
  const double c = 2.0 * nu / (l * l);
  const double log_v = 0.5 * d * std::log(4.0 * pi) + std::lgamma(nu + 0.5 * d) - std::lgamma(nu) +
                       nu * std::log(c) - (nu + 0.5 * d) * std::log(c + omega * omega);
  return std::exp(log_v);
}

// Windowed Dirichlet spectrum: (1/(2m+1)) sum_j sqrt(2 pi) W exp(-W^2 (w - j/l)^2 / 2).
double windowed_dirichlet(const KernelSpec& spec, double window, double omega) {
  double acc = 0.0;
  for (int j = -spec.m_dir; j <= spec.m_dir; ++j) {
    const double u = omega - j / spec.lengthscale;
    acc += std::exp(-0.5 * window * window * u * u);
  }
  return std::sqrt(2.0 * pi) * window * acc / (2.0 * spec.m_dir + 1.0);
}

Integral quadrature_transform(const Kernel& kernel, double omega, int d, const FourierOptions& opt) {
  const auto& spec = kernel.spec();
  const double l = spec.lengthscale;
  std::function<double(double)> profile;
  double reach = 0.0;
  double monotone_from = 0.0;
  if (spec.family == KernelFamily::Dirichlet) {
    const double w = opt.dirichlet_window;
    profile = [&kernel, w](double r) { return kernel(r) * std::exp(-0.5 * r * r / (w * w)); };
    reach = w * std::sqrt(2.0 * std::log(1e12));
    monotone_from = reach;
  } else {
    profile = [&kernel](double r) { return kernel(r); };
    reach = kernel.effective_support(1e-15);
    monotone_from = std::max(kernel.effective_support(1e-3), 4.0 * l);
  }
  const double scale = l;
  if (d == 1) {
    auto g = [&](double r) { return 2.0 * profile(r); };
    return oscillatory_integral(g, omega, omega > 0.0 ? Trig::Cos : Trig::None, reach, monotone_from, scale);
  }
  if (omega == 0.0) {
    auto g = [&](double r) { return 4.0 * pi * r * r * profile(r); };
    return oscillatory_integral(g, 0.0, Trig::None, reach, monotone_from, scale);
  }
  auto g = [&](double r) { return (4.0 * pi / omega) * r * profile(r); };
  return oscillatory_integral(g, omega, Trig::Sin, reach, monotone_from, scale);
}

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace

FourierSamples radial_fourier(const KernelSpec& spec_in, std::span<const double> omegas, int d,
                              const FourierOptions& options) {
  KernelSpec spec = spec_in;
  spec.dim = d;
  spec.validate();
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (!(omegas[i] >= 0.0) || !std::isfinite(omegas[i]))
      throw std::invalid_argument("radial_fourier: frequencies must be finite and non-negative");
    if (i > 0 && !(omegas[i] > omegas[i - 1]))
      throw std::invalid_argument("radial_fourier: frequencies must be strictly increasing");
  }

  FourierSamples out;
  out.dim = d;
  out.quadrature_tol = options.quadrature_tol;
  out.omegas.assign(omegas.begin(), omegas.end());
  out.values.reserve(omegas.size());
  out.residuals.reserve(omegas.size());

  const bool closed = !options.force_quadrature &&
                      (spec.family == KernelFamily::SquareExp || spec.family == KernelFamily::Matern ||
                       spec.family == KernelFamily::Dirichlet);
  if (closed) {
    for (double w : omegas) {
      double v = 0.0;
      switch (spec.family) {
        case KernelFamily::SquareExp: v = closed_form_se(spec.lengthscale, d, w); break;
        case KernelFamily::Matern: v = closed_form_matern(spec.nu, spec.lengthscale, d, w); break;
        default: v = windowed_dirichlet(spec, options.dirichlet_window, w); break;
      }
      out.values.push_back(v);
      out.residuals.push_back(0.0);
    }
    return out;
  }

  if (d != 1 && d != 3)
    throw ConfigError("radial_fourier: quadrature path supports d = 1 and d = 3 only");
  const Kernel kernel(spec);
  for (double w : omegas) {
    const auto res = quadrature_transform(kernel, w, d, options);
    if (!std::isfinite(res.value) || res.error > options.quadrature_tol)
      throw QuadratureError("radial_fourier: quadrature missed tolerance at omega=" + std::to_string(w),
                            res.error);
    out.values.push_back(res.value);
    out.residuals.push_back(res.error);
  }
  return out;
}

DecayFit fit_decay_slope(const FourierSamples& samples, double omega_min, double omega_max,
                         double vanish_level) {
  std::vector<double> w, v;
  for (std::size_t i = 0; i < samples.omegas.size(); ++i) {
    if (samples.omegas[i] >= omega_min && samples.omegas[i] <= omega_max) {
      w.push_back(samples.omegas[i]);
      v.push_back(samples.values[i]);
    }
  }
  if (w.size() < 20) throw std::invalid_argument("fit_decay_slope: need at least 20 samples in the window");

  DecayFit fit;
  if (std::all_of(v.begin(), v.end(), [&](double x) { return std::abs(x) < vanish_level; })) {
    fit.verdict = DecayKind::CompactSupport;
    fit.tau_hat = std::numeric_limits<double>::infinity();
    fit.samples_used = w.size();
    fit.omega_cut = w.back();
    return fit;
  }

  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * v.front();
  std::size_t keep = 0;
  while (keep < v.size() && v[keep] >= floor) ++keep;
  if (keep < 20) throw std::invalid_argument("fit_decay_slope: fewer than 20 samples above the noise floor");
  std::vector<double> log_w, lin_w, log_v;
  for (std::size_t i = 0; i < keep; ++i) {
    if (!(v[i] > 0.0)) throw std::invalid_argument("fit_decay_slope: non-positive transform value in tail");
    log_w.push_back(std::log1p(w[i]));
    lin_w.push_back(w[i]);
    log_v.push_back(std::log(v[i]));
  }
  const auto loglog = least_squares(log_w, log_v);
  const auto semilog = least_squares(lin_w, log_v);
  fit.tau_hat = -loglog.slope;
  fit.r2_loglog = loglog.r2;
  fit.r2_semilog = semilog.r2;
  fit.verdict = semilog.r2 > loglog.r2 ? DecayKind::Exponential : DecayKind::Polynomial;
  fit.samples_used = keep;
  fit.omega_cut = w[keep - 1];
  return fit;
}

PointList uniform_grid(int grid_per_axis, int d) {
  if (grid_per_axis < 1 || d < 1) throw ConfigError("uniform_grid: grid size and dimension must be >= 1");
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(grid_per_axis);
  PointList pts;
  pts.reserve(total);
  std::vector<int> idx(d, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Point p(d);
    for (int k = 0; k < d; ++k)
      p[k] = grid_per_axis == 1 ? 0.5 : static_cast<double>(idx[k]) / (grid_per_axis - 1);
    pts.push_back(std::move(p));
    for (int k = d - 1; k >= 0; --k) {
      if (++idx[k] < grid_per_axis) break;
      idx[k] = 0;
    }
  }
  return pts;
}

EigenEstimate nystrom_eigs(const KernelSpec& spec_in, int grid_per_axis, int d) {
  KernelSpec spec = spec_in;
  spec.dim = d;
  const double count = std::pow(static_cast<double>(grid_per_axis), d);
  if (grid_per_axis < 1 || count > 4096.0) throw ConfigError("nystrom_eigs: grid exceeds 4096 points");
  const Kernel kernel(spec);
  const auto pts = uniform_grid(grid_per_axis, d);
  EigenEstimate est;
  est.grid_size = grid_per_axis;
  est.cell_volume = 1.0 / count;
  const Eigen::MatrixXd g = gram(kernel, pts) * est.cell_volume;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  est.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(est.eigenvalues.begin(), est.eigenvalues.end(), std::greater<>());
  return est;
}

double tail_mass(const EigenEstimate& est, std::size_t D, double psi) {
  CompensatedSum sum;
  for (std::size_t m = D; m < est.eigenvalues.size(); ++m) sum.add(est.eigenvalues[m]);
  return psi * psi * sum.value();
}

double eigen_decay_slope(const EigenEstimate& est, std::size_t m_lo, std::size_t m_hi) {
  if (m_lo < 1 || m_hi > est.eigenvalues.size() || m_hi <= m_lo)
    throw std::invalid_argument("eigen_decay_slope: index window out of range");
  std::vector<double> x, y;
  for (std::size_t m = m_lo; m <= m_hi; ++m) {
    const double lam = est.eigenvalues[m - 1];
    if (!(lam > 0.0)) throw std::invalid_argument("eigen_decay_slope: non-positive eigenvalue in window");
    x.push_back(std::log(static_cast<double>(m)));
    y.push_back(std::log(lam));
  }
  return least_squares(x, y).slope;
}

InfoGainCurve empirical_info_gain(const KernelSpec& spec, double sigma2, const PointList& candidates,
                                  int n_max) {
  if (!(sigma2 > 0.0)) throw ConfigError("empirical_info_gain: sigma2 must be positive");
  if (n_max < 0 || static_cast<std::size_t>(n_max) > candidates.size())
    throw ConfigError("empirical_info_gain: n_max exceeds the candidate count");
  const Kernel kernel(spec);
  const auto N = static_cast<Eigen::Index>(candidates.size());

  InfoGainCurve curve;
  curve.sigma2 = sigma2;
  curve.candidate_count = candidates.size();

  // Column c of proj holds L^{-1} k_S(c) for the selected set S, where
  // L L^T = K_S + sigma2 I; var holds the posterior variances.
  Eigen::MatrixXd proj(n_max, N);
  Eigen::VectorXd var(N);
  for (Eigen::Index c = 0; c < N; ++c) var[c] = kernel(candidates[c], candidates[c]);
  std::vector<bool> taken(candidates.size(), false);
  double gain = 0.0;
  for (int t = 0; t < n_max; ++t) {
    Eigen::Index best = -1;
    for (Eigen::Index c = 0; c < N; ++c) {
      if (taken[c]) continue;
      if (best < 0 || var[c] > var[best]) best = c;
    }
    double pivot = sigma2 + var[best];
    double jitter = 0.0;
    if (!(pivot > 0.0)) {
      jitter = 1e-10;
      pivot += jitter;
      if (!(pivot > 0.0)) throw FactorizationError("empirical_info_gain: Cholesky breakdown after jitter");
    }
    const double diag = std::sqrt(pivot);
    gain += 0.5 * std::log1p(std::max(var[best], 0.0) / sigma2);
    taken[best] = true;
    curve.selected.push_back(static_cast<std::size_t>(best));
    curve.n_values.push_back(t + 1);
    curve.gamma_hat.push_back(gain);
    const Eigen::VectorXd vb = proj.col(best).head(t);
    for (Eigen::Index c = 0; c < N; ++c) {
      if (taken[c] && c != best) {
        proj(t, c) = 0.0;
        continue;
      }
      const double cross = kernel(candidates[c], candidates[best]);
      const double comp = (cross - proj.col(c).head(t).dot(vb)) / diag;
      proj(t, c) = comp;
      var[c] -= comp * comp;
    }
  }
  return curve;
}

InfoGainExponent info_gain_bound_exponent(const KernelSpec& spec) {
  spec.validate();
  const double d = spec.dim;
  const bool odd = spec.dim % 2 == 1;
  InfoGainExponent e;
  switch (spec.family) {
    case KernelFamily::Matern: {
      const double nu = spec.nu;
      e.improved_regime = nu >= 1.0 || (nu >= 0.5 && odd);
      if (e.improved_regime) {
        e.n_exponent = d / (2.0 * nu + d);
        e.log_exponent = 2.0 * nu / (2.0 * nu + d);
      } else {
        e.n_exponent = d / (2.0 * nu);
        e.log_exponent = (2.0 * nu - d) / (2.0 * nu);
      }
      break;
    }
    case KernelFamily::GammaExp: {
      const double g = spec.gamma;
      e.improved_regime = g >= 1.0 && g <= 2.0 && odd;
      if (e.improved_regime) {
        e.n_exponent = d / (g + d);
        e.log_exponent = g / (g + d);
      } else {
        e.n_exponent = d / g;
        e.log_exponent = (g - d) / g;
      }
      break;
    }
    case KernelFamily::PiecewisePoly: {
      const double b = 2.0 * spec.q_pp + 1.0;
      e.applicable = !(spec.q_pp == 0 && spec.dim <= 2);
      e.improved_regime = e.applicable;
      e.n_exponent = d / (b + d);
      e.log_exponent = b / (b + d);
      break;
    }
    case KernelFamily::SquareExp:
    case KernelFamily::RationalQuad:
      e.n_exponent = 0.0;
      e.log_exponent = d + 1.0;
      e.improved_regime = true;
      break;
    case KernelFamily::Dirichlet:
      e.n_exponent = 0.0;
      e.log_exponent = 1.0;
      e.improved_regime = true;
      break;
  }
  return e;
}

}  // namespace isobandit
