#include "isobandit/envs.hpp"

#include <algorithm>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "isobandit/errors.hpp"

namespace isobandit {
namespace {

bool in_unit_cube(const Point& x) {
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (!(x[k] >= 0.0 && x[k] <= 1.0)) return false;
  return true;
}

KernelSpec parse_description(const std::string& line) {
  KernelSpec spec;
  std::istringstream is(line);
  std::string token;
  bool have_family = false;
  while (is >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ConfigError("kernel record: bad token '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    try {
      if (key == "family") {
        spec.family = parse_family(value);
        have_family = true;
      } else if (key == "lengthscale") {
        spec.lengthscale = std::stod(value);
      } else if (key == "nu") {
        spec.nu = std::stod(value);
      } else if (key == "a") {
        spec.a = std::stod(value);
      } else if (key == "gamma") {
        spec.gamma = std::stod(value);
      } else if (key == "q") {
        spec.q_pp = std::stoi(value);
      } else if (key == "m") {
        spec.m_dir = std::stoi(value);
      } else if (key == "dim") {
        spec.dim = std::stoi(value);
      } else {
        throw ConfigError("kernel record: unknown key '" + key + "'");
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ConfigError*>(&e)) throw;
      throw ConfigError("kernel record: bad value for '" + key + "'");
    }
  }
  if (!have_family) throw ConfigError("kernel record: missing family");
  spec.validate();
  return spec;
}

void expect_word(std::istream& is, const std::string& word) {
  std::string got;
  if (!(is >> got) || got != word) throw ConfigError("rkhs record: expected '" + word + "'");
}

double golden_max(const auto& g, double lo, double hi, double& best_x) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = g(c), fd = g(d);
  for (int it = 0; it < 60 && b - a > 1e-14; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = g(d);
    }
  }
  best_x = fc > fd ? c : d;
  return std::max(fc, fd);
}

}  // namespace

RkhsFunction::RkhsFunction(const KernelSpec& kernel, PointList centers, std::vector<double> coeffs,
                           std::uint64_t seed)
    : kernel_(kernel), centers_(std::move(centers)), coeffs_(std::move(coeffs)), seed_(seed) {
  if (centers_.size() != coeffs_.size()) throw ConfigError("rkhs function: centers/coeffs size mismatch");
  for (const auto& c : centers_) {
    if (c.size() != kernel.dim) throw ConfigError("rkhs function: center dimension mismatch");
    if (!in_unit_cube(c)) throw ConfigError("rkhs function: center outside [0,1]^d");
  }
  if (!centers_.empty()) {
    const Eigen::MatrixXd K = gram(kernel_, centers_);
    const Eigen::Map<const Eigen::VectorXd> a(coeffs_.data(), static_cast<Eigen::Index>(coeffs_.size()));
    norm_ = std::sqrt(std::max(0.0, a.dot(K * a)));
  }
  argmax_ = Point::Zero(kernel.dim);
  max_f_ = (*this)(argmax_);
}

double RkhsFunction::operator()(const Point& x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < centers_.size(); ++i) acc += coeffs_[i] * kernel_(x, centers_[i]);
  return acc;
}

void RkhsFunction::rescale(double factor) {
  for (auto& a : coeffs_) a *= factor;
  norm_ *= std::abs(factor);
  if (grid_per_axis_ > 0) {
    certify_maximum(grid_per_axis_);
  } else {
    max_f_ = (*this)(argmax_);
  }
}

void RkhsFunction::certify_maximum(int grid_per_axis) {
  const int d = dim();
  if (grid_per_axis < 2) throw ConfigError("certification grid needs >= 2 points per axis");
  if (std::pow(static_cast<double>(grid_per_axis), d) > 1e6)
    throw ConfigError("certification grid exceeds 1e6 points");
  grid_per_axis_ = grid_per_axis;

  const double step = 1.0 / (grid_per_axis - 1);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Point x(d);
  double best = -std::numeric_limits<double>::infinity();
  Point best_x = Point::Zero(d);
  while (true) {
    for (int k = 0; k < d; ++k) x[k] = idx[static_cast<std::size_t>(k)] * step;
    const double v = (*this)(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
    int k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] == grid_per_axis) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == d) break;
  }
  for (const auto& c : centers_) {
    const double v = (*this)(c);
    if (v > best) {
      best = v;
      best_x = c;
    }
  }
  for (int pass = 0; pass < 2; ++pass) {
    for (int k = 0; k < d; ++k) {
      Point probe = best_x;
      auto g = [&](double t) {
        probe[k] = t;
        return (*this)(probe);
      };
      double tk = best_x[k];
      const double v = golden_max(g, std::max(0.0, best_x[k] - step), std::min(1.0, best_x[k] + step), tk);
      if (v > best) {
        best = v;
        best_x[k] = tk;
      }
    }
  }
  argmax_ = best_x;
  max_f_ = best;
}

void RkhsFunction::write(std::ostream& os) const {
  os << std::setprecision(17);
  os << "rkhs_function 1\n";
  os << "kernel " << kernel_spec().describe() << '\n';
  os << "seed " << seed_ << '\n';
  os << "grid " << grid_per_axis_ << '\n';
  os << "centers " << centers_.size() << '\n';
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    for (Eigen::Index k = 0; k < centers_[i].size(); ++k) os << centers_[i][k] << ' ';
    os << coeffs_[i] << '\n';
  }
}

RkhsFunction RkhsFunction::read(std::istream& is) {
  expect_word(is, "rkhs_function");
  int version = 0;
  if (!(is >> version) || version != 1) throw ConfigError("rkhs record: unsupported version");
  expect_word(is, "kernel");
  std::string line;
  std::getline(is, line);
  const KernelSpec spec = parse_description(line);
  std::uint64_t seed = 0;
  int grid = 0;
  std::size_t n = 0;
  expect_word(is, "seed");
  if (!(is >> seed)) throw ConfigError("rkhs record: bad seed");
  expect_word(is, "grid");
  if (!(is >> grid)) throw ConfigError("rkhs record: bad grid");
  expect_word(is, "centers");
  if (!(is >> n)) throw ConfigError("rkhs record: bad center count");
  PointList centers;
  std::vector<double> coeffs;
  centers.reserve(n);
  coeffs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point c(spec.dim);
    for (int k = 0; k < spec.dim; ++k)
      if (!(is >> c[k])) throw ConfigError("rkhs record: truncated centers");
    double a = 0.0;
    if (!(is >> a)) throw ConfigError("rkhs record: truncated coefficients");
    centers.push_back(std::move(c));
    coeffs.push_back(a);
  }
  RkhsFunction f(spec, std::move(centers), std::move(coeffs), seed);
  if (grid > 0) f.certify_maximum(grid);
  return f;
}

int default_certification_grid(int d) {
  if (d <= 1) return 4096;
  if (d == 2) return 256;
  return static_cast<int>(std::floor(std::pow(1e6, 1.0 / d) + 1e-9));
}

RkhsFunction sample_rkhs_function(const KernelSpec& kernel, double B, int n_centers, std::uint64_t seed,
                                  int grid_per_axis) {
  kernel.validate();
  if (!(B > 0.0)) throw ConfigError("rkhs function: B must be > 0");
  if (n_centers < 1) throw ConfigError("rkhs function: need at least one center");
  Philox4x32 rng(seed, Stream::FunctionSampling);
  boost::random::normal_distribution<double> normal;
  PointList centers;
  std::vector<double> coeffs;
  for (int i = 0; i < n_centers; ++i) {
    Point c(kernel.dim);
    for (int k = 0; k < kernel.dim; ++k) c[k] = rng.uniform01();
    centers.push_back(std::move(c));
    coeffs.push_back(normal(rng));
  }
  RkhsFunction f(kernel, std::move(centers), std::move(coeffs), seed);
  if (!(f.norm() > 0.0)) throw ConfigError("rkhs function: degenerate sample");
  f.rescale(B / f.norm());
  f.certify_maximum(grid_per_axis);
  return f;
}

RkhsFunction sample_multiscale_function(const KernelSpec& kernel, double B, int levels, std::uint64_t seed,
                                        int grid_per_axis) {
  kernel.validate();
  if (!(B > 0.0)) throw ConfigError("multiscale function: B must be > 0");
  if (levels < 1 || levels > 40) throw ConfigError("multiscale function: levels must be in [1, 40]");
  const Kernel k(kernel);
  Philox4x32 rng(seed, Stream::FunctionSampling);
  PointList centers;
  std::vector<double> coeffs;
  for (int j = 1; j <= levels; ++j) {
    const double eps = std::ldexp(1.0, -j);
    const double pair_norm = std::sqrt(2.0 * (1.0 - k(eps)));
    if (!(pair_norm > 0.0)) continue;
    Point c(kernel.dim);
    for (int a = 0; a < kernel.dim; ++a) c[a] = 0.05 + 0.4 * rng.uniform01();
    Point partner = c;
    partner[0] += eps;
    const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    const double w = sign / (j * pair_norm);
    centers.push_back(c);
    coeffs.push_back(w);
    centers.push_back(partner);
    coeffs.push_back(-w);
  }
  RkhsFunction f(kernel, std::move(centers), std::move(coeffs), seed);
  if (!(f.norm() > 0.0)) throw ConfigError("multiscale function: degenerate construction");
  f.rescale(B / f.norm());
  f.certify_maximum(grid_per_axis);
  return f;
}

double NoiseModel::draw(Philox4x32& rng) const {
  if (scale == 0.0) return 0.0;
  switch (kind) {
    case NoiseKind::Gaussian: return boost::random::normal_distribution<double>(0.0, scale)(rng);
    case NoiseKind::UniformBounded: return boost::random::uniform_real_distribution<double>(-scale, scale)(rng);
  }
  return 0.0;
}

BanditOracle::BanditOracle(RkhsFunction f, NoiseModel noise, std::uint64_t seed)
    : f_(std::move(f)), noise_(noise), seed_(seed), rng_(seed, Stream::Noise) {
  if (!(noise.scale >= 0.0) || !std::isfinite(noise.scale)) throw ConfigError("noise scale must be >= 0");
}

double BanditOracle::query(const Point& x) {
  if (x.size() != f_.dim()) throw std::invalid_argument("oracle: point dimension mismatch");
  if (!in_unit_cube(x)) throw std::out_of_range("oracle: query outside [0,1]^d");
  const double fx = f_(x);
  last_regret_ = f_.max_value() - fx;
  cum_regret_ += last_regret_;
  ++query_count_;
  return fx + noise_.draw(rng_);
}

HolderQuotient holder_quotient_check(const RkhsFunction& f, double alpha, std::size_t n_pairs,
                                     std::uint64_t seed) {
  if (!(alpha > 0.0)) throw ConfigError("holder check: alpha must be > 0");
  if (n_pairs < 4) throw ConfigError("holder check: need at least 4 pairs");
  const int order = static_cast<int>(std::ceil(alpha - 1e-12));
  const int d = f.dim();
  std::vector<double> weights(static_cast<std::size_t>(order + 1));
  for (int i = 0; i <= order; ++i)
    weights[static_cast<std::size_t>(i)] =
        ((order - i) % 2 ? -1.0 : 1.0) * boost::math::binomial_coefficient<double>(order, i);

  Philox4x32 rng(seed, Stream::Harness, 1);
  boost::random::normal_distribution<double> normal;
  const double log_lo = std::log(1.0 / static_cast<double>(n_pairs));
  const double log_hi = std::log(0.25);
  HolderQuotient out;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    Point x(d);
    if (p % 2 == 0 && !f.centers().empty()) {
      const auto at = std::min(f.centers().size() - 1,
                               static_cast<std::size_t>(rng.uniform01() * f.centers().size()));
      x = f.centers()[at];
    } else {
      for (int k = 0; k < d; ++k) x[k] = rng.uniform01();
    }
    const double h = std::exp(log_lo + (log_hi - log_lo) * rng.uniform01());
    Point u(d);
    if (d == 1) {
      u[0] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    } else {
      for (int k = 0; k < d; ++k) u[k] = normal(rng);
      u /= u.norm();
    }
    if (!in_unit_cube(x + (order * h) * u)) u = -u;
    if (!in_unit_cube(x + (order * h) * u)) continue;
    double diff = 0.0;
    for (int i = 0; i <= order; ++i) diff += weights[static_cast<std::size_t>(i)] * f(x + (i * h) * u);
    out.max_quotient = std::max(out.max_quotient, std::abs(diff) / std::pow(h, alpha));
    ++out.pairs_used;
  }
  return out;
}

HolderVerdict holder_divergence_check(const RkhsFunction& f, double alpha, std::uint64_t seed) {
  HolderVerdict v;
  v.coarse = holder_quotient_check(f, alpha, 10000, seed).max_quotient;
  v.fine = holder_quotient_check(f, alpha, 100000, seed).max_quotient;
  return v;
}

}  // namespace isobandit
