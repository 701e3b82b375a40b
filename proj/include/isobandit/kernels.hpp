#pragma once

#include <Eigen/Core>

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace isobandit {

using Point = Eigen::VectorXd;
using PointList = std::vector<Point>;

enum class KernelFamily { Matern, SquareExp, RationalQuad, GammaExp, PiecewisePoly, Dirichlet };

std::string_view to_string(KernelFamily family);
// Accepts the config spellings: matern, se/square-exp, rq/rational-quadratic,
// gamma-exp, pp/piecewise-poly, dirichlet.
KernelFamily parse_family(std::string_view name);

/// Isotropic kernel family and hyperparameters. Only the fields of the
/// selected family are read; the rest keep their defaults.
struct KernelSpec {
  KernelFamily family = KernelFamily::SquareExp;
  double lengthscale = 1.0;
  double nu = 1.5;     // Matern
  double a = 1.0;      // RationalQuad
  double gamma = 1.0;  // GammaExp, in (0, 2]
  int q_pp = 1;        // PiecewisePoly, in {0,1,2,3}
  int m_dir = 1;       // Dirichlet harmonic order
  int dim = 1;

  static KernelSpec matern(double nu, double lengthscale = 1.0, int dim = 1);
  static KernelSpec square_exp(double lengthscale = 1.0, int dim = 1);
  static KernelSpec rational_quad(double a, double lengthscale = 1.0, int dim = 1);
  static KernelSpec gamma_exp(double gamma, double lengthscale = 1.0, int dim = 1);
  static KernelSpec piecewise_poly(int q, double lengthscale = 1.0, int dim = 1);
  static KernelSpec dirichlet(int m, double lengthscale = 1.0);

  /// Throws ConfigError on out-of-range parameters, including the Dirichlet
  /// kernel in more than one dimension (not known to be positive definite).
  void validate() const;

  /// Stable one-line "key=value" rendering used in CSV headers and records.
  std::string describe() const;
  /// Short filesystem-friendly tag, e.g. "matern-nu0.5-l0.2-d1".
  std::string tag() const;

  bool operator==(const KernelSpec&) const = default;
};

enum class DecayKind { Exponential, Polynomial, CompactSupport };
std::string_view to_string(DecayKind kind);

struct SpectralDecayClass {
  DecayKind kind = DecayKind::Exponential;
  // tau = beta + d; NaN unless kind == Polynomial.
  double tau = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
};

struct SmoothnessParams {
  double alpha = 0.0;
  int q = 0;           // ceil(alpha) - 1
  double s = 0.0;      // alpha - q, in (0, 1]
  double alpha1 = 0.0; // max{s, min{1, q}}
  double L = 1.0;
  bool capped = false; // alpha came from alpha_cap (infinitely smooth family)
};

/// q, s and alpha1 derived from a finite Holder order.
SmoothnessParams smoothness_from_alpha(double alpha, double L);

struct PpPolynomial {
  std::vector<double> coeffs;  // monomial coefficients c_0..c_deg on [0, 1]
  int degree = 0;
  // Factored form (1 - r)^root_multiplicity * sum_i bracket[i] r^i, which
  // evaluates without cancellation near r = 1.
  int root_multiplicity = 0;
  std::vector<double> bracket;
  // q = 0 in d <= 2: the transform's matching lower decay bound is not
  // available, only the upper one.
  bool lower_bound_unavailable = false;
};

/// Compactly supported piecewise-polynomial (Wendland) profile of smoothness
/// order q in dimension d, normalized to value 1 at r = 0.
PpPolynomial pp_polynomial(int q, int d);

/// Immutable evaluator built from a validated spec; precomputes family
/// constants. Cheap to copy and safe to share between threads.
class Kernel {
 public:
  explicit Kernel(KernelSpec spec);

  /// Profile k(r), r >= 0. Throws std::domain_error for negative or
  /// non-finite r.
  double operator()(double r) const;

  /// k(||x - y||_2). Throws std::invalid_argument on dimension mismatch.
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) const;

  const KernelSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }

  /// Radius beyond which |k(r)| < threshold (1 for compact support scaled by
  /// the lengthscale). Dirichlet never decays; returns +inf.
  double effective_support(double threshold) const;

 private:
  double eval_unchecked(double r) const;
  double matern_general(double z) const;

  KernelSpec spec_;
  double matern_scale_ = 0.0;    // sqrt(2 nu) / l
  double matern_log_norm_ = 0.0; // log(2^{1-nu} / Gamma(nu))
  int half_integer_p_ = -1;      // nu = p + 1/2 when >= 0
  std::vector<double> half_integer_coeffs_;
  std::vector<double> pp_bracket_;
  int pp_power_ = 0;
};

/// Symmetric Gram matrix; upper triangle computed and mirrored.
Eigen::MatrixXd gram(const Kernel& kernel, const PointList& points);
/// Gram matrix of the columns of a d x n matrix.
Eigen::MatrixXd gram(const Kernel& kernel, const Eigen::MatrixXd& columns);

SpectralDecayClass decay_class(const KernelSpec& spec);

/// Holder order per family (Matern nu, gamma-exp gamma/2, PP q+1/2); the
/// infinitely smooth families (SE, RQ, Dirichlet) use alpha_cap.
SmoothnessParams holder_params(const KernelSpec& spec, double L, double alpha_cap = 2.0);

}  // namespace isobandit
