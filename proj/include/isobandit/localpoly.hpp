#pragma once

#include <optional>
#include <span>
#include <vector>

#include "isobandit/kernels.hpp"

namespace isobandit {

/// Monomials of total degree <= q in d variables, graded then
/// lexicographically decreasing (x1 before x2 at equal degree).
class PolyBasis {
 public:
  PolyBasis(int degree, int dim);

  int degree() const { return degree_; }
  int dim() const { return dim_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<std::vector<int>>& multi_indices() const { return indices_; }

  /// Values of every basis monomial at u.
  Eigen::VectorXd evaluate(const Eigen::Ref<const Eigen::VectorXd>& u) const;

 private:
  int degree_;
  int dim_;
  std::vector<std::vector<int>> indices_;
};

/// binomial(q + d, d): the number of points a unisolvent set needs.
std::size_t basis_size(int q, int d);
/// (q + 2)^d: the sufficient count the algorithms wait for.
std::size_t sufficient_count(int q, int d);

struct LpWeights {
  Eigen::VectorXd weights;
  Point target;
  int degree = 0;
  double residual = 0.0;  // max over monomials of |sum_i w_i p(u_i) - p(0)|
  double scale = 1.0;     // coordinates were mapped to (x - z) / scale
};

/// Minimum-norm weights reproducing every polynomial of degree <= q at z.
/// Coordinates are centered at z and divided by `scale` (default: the largest
/// distance from z to a point). Throws UnisolvencyError when there are fewer
/// than basis_size points or the constraint matrix is rank deficient at
/// relative tolerance 1e-10.
LpWeights solve_weights(const PointList& points, const Point& z, int q,
                        std::optional<double> scale = std::nullopt);

/// sum_i w_i y_i. Throws std::invalid_argument on length mismatch.
double lp_estimate(const LpWeights& w, std::span<const double> ys);

struct LpWidth {
  double bias = 0.0;   // L (sqrt(d) r)^{q+s} (1 + ||w||_1)
  double noise = 0.0;  // sigma ||w||_2 sqrt(2 log(2 / delta))
  double total() const { return bias + noise; }
};

LpWidth lp_width_terms(const LpWeights& w, double L, double r_E, int q, double s, double sigma,
                       double delta_t);
double lp_confidence_width(const LpWeights& w, double L, double r_E, int q, double s, double sigma,
                           double delta_t);

}  // namespace isobandit
