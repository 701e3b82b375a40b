#include "isobandit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "isobandit/bessel.hpp"
#include "isobandit/errors.hpp"

namespace isobandit {

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Matern: return "matern";
    case KernelFamily::SquareExp: return "se";
    case KernelFamily::RationalQuad: return "rq";
    case KernelFamily::GammaExp: return "gamma-exp";
    case KernelFamily::PiecewisePoly: return "pp";
    case KernelFamily::Dirichlet: return "dirichlet";
  }
  return "unknown";
}

KernelFamily parse_family(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(n.begin(), n.end(), '_', '-');
  if (n == "matern") return KernelFamily::Matern;
  if (n == "se" || n == "square-exp" || n == "squareexp" || n == "rbf") return KernelFamily::SquareExp;
  if (n == "rq" || n == "rational-quadratic" || n == "rationalquad") return KernelFamily::RationalQuad;
  if (n == "gamma-exp" || n == "gammaexp" || n == "gamma-exponential") return KernelFamily::GammaExp;
  if (n == "pp" || n == "piecewise-poly" || n == "piecewisepoly" || n == "wendland")
    return KernelFamily::PiecewisePoly;
  if (n == "dirichlet" || n == "pbl") return KernelFamily::Dirichlet;
  throw ConfigError("unknown kernel family '" + std::string(name) + "'");
}

std::string_view to_string(DecayKind kind) {
  switch (kind) {
    case DecayKind::Exponential: return "exponential";
    case DecayKind::Polynomial: return "polynomial";
    case DecayKind::CompactSupport: return "compact-support";
  }
  return "unknown";
}

KernelSpec KernelSpec::matern(double nu, double lengthscale, int dim) {
  KernelSpec s;
  s.family = KernelFamily::Matern;
  s.nu = nu;
  s.lengthscale = lengthscale;
  s.dim = dim;
  return s;
}

KernelSpec KernelSpec::square_exp(double lengthscale, int dim) {
  KernelSpec s;
  s.family = KernelFamily::SquareExp;
  s.lengthscale = lengthscale;
  s.dim = dim;
  return s;
}

KernelSpec KernelSpec::rational_quad(double a, double lengthscale, int dim) {
  KernelSpec s;
  s.family = KernelFamily::RationalQuad;
  s.a = a;
  s.lengthscale = lengthscale;
  s.dim = dim;
  return s;
}

KernelSpec KernelSpec::gamma_exp(double gamma, double lengthscale, int dim) {
  KernelSpec s;
  s.family = KernelFamily::GammaExp;
  s.gamma = gamma;
  s.lengthscale = lengthscale;
  s.dim = dim;
  return s;
}

KernelSpec KernelSpec::piecewise_poly(int q, double lengthscale, int dim) {
  KernelSpec s;
  s.family = KernelFamily::PiecewisePoly;
  s.q_pp = q;
  s.lengthscale = lengthscale;
  s.dim = dim;
  return s;
}

KernelSpec KernelSpec::dirichlet(int m, double lengthscale) {
  KernelSpec s;
  s.family = KernelFamily::Dirichlet;
  s.m_dir = m;
  s.lengthscale = lengthscale;
  s.dim = 1;
  return s;
}

void KernelSpec::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (dim < 1) throw ConfigError("kernel dim must be >= 1");
  if (!positive(lengthscale)) throw ConfigError("kernel lengthscale must be positive");
  switch (family) {
    case KernelFamily::Matern:
      if (!positive(nu)) throw ConfigError("matern nu must be positive");
      break;
    case KernelFamily::RationalQuad:
      if (!positive(a)) throw ConfigError("rational-quadratic a must be positive");
      break;
    case KernelFamily::GammaExp:
      if (!(gamma > 0.0 && gamma <= 2.0)) throw ConfigError("gamma-exp gamma must lie in (0, 2]");
      break;
    case KernelFamily::PiecewisePoly:
      if (q_pp < 0 || q_pp > 3) throw ConfigError("unsupported order: piecewise-poly q must be in {0,1,2,3}");
      break;
    case KernelFamily::Dirichlet:
      if (m_dir < 0) throw ConfigError("dirichlet order m must be >= 0");
      if (dim != 1) throw ConfigError("dirichlet kernel is only supported in d = 1");
      break;
    case KernelFamily::SquareExp:
      break;
  }
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  os << std::setprecision(17) << "family=" << to_string(family) << " lengthscale=" << lengthscale;
  switch (family) {
    case KernelFamily::Matern: os << " nu=" << nu; break;
    case KernelFamily::RationalQuad: os << " a=" << a; break;
    case KernelFamily::GammaExp: os << " gamma=" << gamma; break;
    case KernelFamily::PiecewisePoly: os << " q=" << q_pp; break;
    case KernelFamily::Dirichlet: os << " m=" << m_dir; break;
    case KernelFamily::SquareExp: break;
  }
  os << " dim=" << dim;
  return os.str();
}

std::string KernelSpec::tag() const {
  std::ostringstream os;
  os << to_string(family);
  switch (family) {
    case KernelFamily::Matern: os << "-nu" << nu; break;
    case KernelFamily::RationalQuad: os << "-a" << a; break;
    case KernelFamily::GammaExp: os << "-g" << gamma; break;
    case KernelFamily::PiecewisePoly: os << "-q" << q_pp; break;
    case KernelFamily::Dirichlet: os << "-m" << m_dir; break;
    case KernelFamily::SquareExp: break;
  }
  os << "-l" << lengthscale << "-d" << dim;
  return os.str();
}

SmoothnessParams smoothness_from_alpha(double alpha, double L) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("holder order must be finite and positive");
  SmoothnessParams p;
  p.alpha = alpha;
  p.q = static_cast<int>(std::ceil(alpha)) - 1;
  p.s = alpha - p.q;
  p.alpha1 = std::max(p.s, std::min(1.0, static_cast<double>(p.q)));
  p.L = L;
  return p;
}

namespace {

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<double> one_minus_r_pow(int n) {
  std::vector<double> out{1.0};
  for (int i = 0; i < n; ++i) out = poly_mul(out, {1.0, -1.0});
  return out;
}

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// exp(-z) * sum_i b_i z^i for nu = p + 1/2.
std::vector<double> half_integer_matern_coeffs(int p) {
  std::vector<double> c(p + 1, 0.0);
  // p!/(2p)! * sum_{i=0}^{p} (p+i)! / (i! (p-i)!) (2z)^{p-i}
  const double lead = std::exp(std::lgamma(p + 1.0) - std::lgamma(2.0 * p + 1.0));
  for (int i = 0; i <= p; ++i) {
    const int power = p - i;
    const double term = std::exp(std::lgamma(p + i + 1.0) - std::lgamma(i + 1.0) - std::lgamma(p - i + 1.0));
    c[power] = lead * term * std::pow(2.0, power);
  }
  return c;
}

}  // namespace

PpPolynomial pp_polynomial(int q, int d) {
  if (q < 0 || q > 3) throw ConfigError("unsupported order: piecewise-poly q must be in {0,1,2,3}");
  if (d < 1) throw ConfigError("piecewise-poly dimension must be >= 1");
  const double j = d / 2 + q + 1;
  std::vector<double> bracket;
  switch (q) {
    case 0: bracket = {1.0}; break;
    case 1: bracket = {1.0, j + 1.0}; break;
    case 2: bracket = {1.0, (3.0 * j + 6.0) / 3.0, (j * j + 4.0 * j + 3.0) / 3.0}; break;
    default:
      bracket = {1.0, (15.0 * j + 45.0) / 15.0, (6.0 * j * j + 36.0 * j + 45.0) / 15.0,
                 (j * j * j + 9.0 * j * j + 23.0 * j + 15.0) / 15.0};
      break;
  }
  PpPolynomial out;
  out.root_multiplicity = static_cast<int>(j) + q;
  out.bracket = bracket;
  out.coeffs = poly_mul(one_minus_r_pow(out.root_multiplicity), bracket);
  out.degree = static_cast<int>(out.coeffs.size()) - 1;
  out.lower_bound_unavailable = (q == 0 && d <= 2);
  return out;
}

Kernel::Kernel(KernelSpec spec) : spec_(spec) {
  spec_.validate();
  switch (spec_.family) {
    case KernelFamily::Matern: {
      const double nu = spec_.nu;
      matern_scale_ = std::sqrt(2.0 * nu) / spec_.lengthscale;
      matern_log_norm_ = (1.0 - nu) * std::log(2.0) - std::lgamma(nu);
      const double twice = 2.0 * nu;
      if (std::abs(twice - std::round(twice)) < 1e-12 && static_cast<long>(std::round(twice)) % 2 == 1) {
        half_integer_p_ = static_cast<int>(std::round(nu - 0.5));
        half_integer_coeffs_ = half_integer_matern_coeffs(half_integer_p_);
      }
      break;
    }
    case KernelFamily::PiecewisePoly: {
      const auto pp = pp_polynomial(spec_.q_pp, spec_.dim);
      pp_bracket_ = pp.bracket;
      pp_power_ = pp.root_multiplicity;
      break;
    }
    default:
      break;
  }
}

double Kernel::matern_general(double z) const {
  const double nu = spec_.nu;
  if (z < 1e-8 && nu >= 1.0) {
    // z^nu K_nu(z) normalized: 1 - z^2 / (4 (nu - 1)) + o(z^2); exact to
    // rounding at this z for nu = 1 as well.
    return nu > 1.0 ? 1.0 - z * z / (4.0 * (nu - 1.0)) : 1.0;
  }
  if (z > 700.0) {
    return std::exp(matern_log_norm_ + nu * std::log(z) - z) * bessel_k_scaled(nu, z);
  }
  return std::exp(matern_log_norm_ + nu * std::log(z)) * bessel_k(nu, z);
}

double Kernel::eval_unchecked(double r) const {
  const double l = spec_.lengthscale;
  switch (spec_.family) {
    case KernelFamily::Matern: {
      if (r == 0.0) return 1.0;
      const double z = matern_scale_ * r;
      if (half_integer_p_ >= 0) return std::exp(-z) * horner(half_integer_coeffs_, z);
      return matern_general(z);
    }
    case KernelFamily::SquareExp: {
      const double u = r / l;
      return std::exp(-0.5 * u * u);
    }
    case KernelFamily::RationalQuad: {
      const double u = r / l;
      return std::pow(1.0 + u * u / (2.0 * spec_.a), -spec_.a);
    }
    case KernelFamily::GammaExp:
      return std::exp(-std::pow(r / l, spec_.gamma));
    case KernelFamily::PiecewisePoly: {
      const double u = r / l;
      if (u >= 1.0) return 0.0;
      return std::pow(1.0 - u, pp_power_) * horner(pp_bracket_, u);
    }
    case KernelFamily::Dirichlet: {
      // (1/(2m+1)) sum_{k=-m}^{m} e^{-ikr}, as a real cosine sum.
      const double u = r / l;
      double acc = 1.0;
      for (int k = 1; k <= spec_.m_dir; ++k) acc += 2.0 * std::cos(k * u);
      return acc / (2.0 * spec_.m_dir + 1.0);
    }
  }
  return 0.0;
}

double Kernel::operator()(double r) const {
  if (!std::isfinite(r)) throw std::domain_error("kernel: distance must be finite");
  if (r < 0.0) throw std::domain_error("kernel: distance must be non-negative");
  return eval_unchecked(r);
}

double Kernel::operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (x.size() != y.size() || x.size() != spec_.dim)
    throw std::invalid_argument("kernel: point dimension mismatch");
  const double r = (x - y).norm();
  if (!std::isfinite(r)) throw std::domain_error("kernel: distance must be finite");
  return eval_unchecked(r);
}

double Kernel::effective_support(double threshold) const {
  const double l = spec_.lengthscale;
  const double log_inv = std::log(1.0 / threshold);
  switch (spec_.family) {
    case KernelFamily::SquareExp: return l * std::sqrt(2.0 * log_inv);
    case KernelFamily::RationalQuad:
      return l * std::sqrt(2.0 * spec_.a * (std::pow(threshold, -1.0 / spec_.a) - 1.0));
    case KernelFamily::GammaExp: return l * std::pow(log_inv, 1.0 / spec_.gamma);
    case KernelFamily::PiecewisePoly: return l;
    case KernelFamily::Dirichlet: return std::numeric_limits<double>::infinity();
    case KernelFamily::Matern: {
      double hi = l;
      while (std::abs(eval_unchecked(hi)) >= threshold) hi *= 2.0;
      double lo = hi / 2.0;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::abs(eval_unchecked(mid)) >= threshold ? lo : hi) = mid;
      }
      return hi;
    }
  }
  return l;
}

Eigen::MatrixXd gram(const Kernel& kernel, const PointList& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = kernel(points[i], points[i]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      g(i, j) = kernel(points[i], points[j]);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

Eigen::MatrixXd gram(const Kernel& kernel, const Eigen::MatrixXd& columns) {
  const auto n = columns.cols();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = kernel(columns.col(i), columns.col(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      g(i, j) = kernel(columns.col(i), columns.col(j));
      g(j, i) = g(i, j);
    }
  }
  return g;
}

SpectralDecayClass decay_class(const KernelSpec& spec) {
  spec.validate();
  const double d = spec.dim;
  SpectralDecayClass out;
  switch (spec.family) {
    case KernelFamily::Matern:
      out.kind = DecayKind::Polynomial;
      out.beta = 2.0 * spec.nu;
      break;
    case KernelFamily::GammaExp:
      out.kind = DecayKind::Polynomial;
      out.beta = spec.gamma;
      break;
    case KernelFamily::PiecewisePoly:
      out.kind = DecayKind::Polynomial;
      out.beta = 2.0 * spec.q_pp + 1.0;
      break;
    case KernelFamily::SquareExp:
    case KernelFamily::RationalQuad:
      out.kind = DecayKind::Exponential;
      return out;
    case KernelFamily::Dirichlet:
      out.kind = DecayKind::CompactSupport;
      return out;
  }
  out.tau = out.beta + d;
  return out;
}

SmoothnessParams holder_params(const KernelSpec& spec, double L, double alpha_cap) {
  spec.validate();
  if (!(L > 0.0)) throw ConfigError("holder norm bound L must be positive");
  double alpha = alpha_cap;
  bool capped = false;
  switch (spec.family) {
    case KernelFamily::Matern: alpha = spec.nu; break;
    case KernelFamily::GammaExp: alpha = spec.gamma / 2.0; break;
    case KernelFamily::PiecewisePoly: alpha = spec.q_pp + 0.5; break;
    case KernelFamily::SquareExp:
    case KernelFamily::RationalQuad:
    case KernelFamily::Dirichlet:
      if (!(alpha_cap > 0.0)) throw ConfigError("alpha_cap must be positive");
      capped = true;
      break;
  }
  auto p = smoothness_from_alpha(alpha, L);
  p.capped = capped;
  return p;
}

}  // namespace isobandit
