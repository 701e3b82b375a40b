#include "isobandit/localpoly.hpp"

#include <Eigen/QR>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "isobandit/errors.hpp"

namespace isobandit {

PolyBasis::PolyBasis(int degree, int dim) : degree_(degree), dim_(dim) {
  if (degree < 0 || dim < 1) throw ConfigError("poly basis: need degree >= 0 and dim >= 1");
  std::vector<int> alpha(dim, 0);
  // Exponent tuples of a fixed total in lexicographically decreasing order.
  std::function<void(int, int)> fill = [&](int axis, int left) {
    if (axis == dim - 1) {
      alpha[axis] = left;
      indices_.push_back(alpha);
      return;
    }
    for (int e = left; e >= 0; --e) {
      alpha[axis] = e;
      fill(axis + 1, left - e);
    }
  };
  for (int total = 0; total <= degree; ++total) fill(0, total);
}

Eigen::VectorXd PolyBasis::evaluate(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(indices_.size()));
  for (std::size_t j = 0; j < indices_.size(); ++j) {
    double v = 1.0;
    for (int k = 0; k < dim_; ++k)
      for (int e = 0; e < indices_[j][k]; ++e) v *= u[k];
    out[static_cast<Eigen::Index>(j)] = v;
  }
  return out;
}

std::size_t basis_size(int q, int d) {
  std::size_t c = 1;
  for (int i = 1; i <= d; ++i) c = c * static_cast<std::size_t>(q + i) / static_cast<std::size_t>(i);
  return c;
}

std::size_t sufficient_count(int q, int d) {
  std::size_t c = 1;
  for (int i = 0; i < d; ++i) c *= static_cast<std::size_t>(q + 2);
  return c;
}

LpWeights solve_weights(const PointList& points, const Point& z, int q, std::optional<double> scale) {
  const int d = static_cast<int>(z.size());
  const PolyBasis basis(q, d);
  const auto m = static_cast<Eigen::Index>(points.size());
  const auto p = static_cast<Eigen::Index>(basis.size());
  if (static_cast<std::size_t>(m) < basis.size())
    throw UnisolvencyError("local poly: fewer points than basis monomials");

  double h = 0.0;
  if (scale) {
    h = *scale;
  } else {
    for (const auto& x : points) {
      if (x.size() != d) throw std::invalid_argument("local poly: point dimension mismatch");
      h = std::max(h, (x - z).norm());
    }
  }
  if (!(h > 0.0) || !std::isfinite(h)) h = 1.0;

  // Constraint matrix V^T (p x m): column i holds every monomial at u_i.
  Eigen::MatrixXd Vt(p, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (points[i].size() != d) throw std::invalid_argument("local poly: point dimension mismatch");
    Vt.col(i) = basis.evaluate((points[i] - z) / h);
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  rhs[0] = 1.0;  // only the constant monomial is nonzero at u = 0

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-10);
  cod.compute(Vt);
  if (cod.rank() < p) throw UnisolvencyError("local poly: constraint matrix is rank deficient");

  LpWeights out;
  out.weights = cod.solve(rhs);
  out.target = z;
  out.degree = q;
  out.scale = h;
  out.residual = (Vt * out.weights - rhs).cwiseAbs().maxCoeff();
  return out;
}

double lp_estimate(const LpWeights& w, std::span<const double> ys) {
  if (ys.size() != static_cast<std::size_t>(w.weights.size()))
    throw std::invalid_argument("lp_estimate: weights and observations differ in length");
  double acc = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) acc += w.weights[static_cast<Eigen::Index>(i)] * ys[i];
  return acc;
}

LpWidth lp_width_terms(const LpWeights& w, double L, double r_E, int q, double s, double sigma,
                       double delta_t) {
  const double d = static_cast<double>(w.target.size());
  LpWidth out;
  out.bias = L * std::pow(std::sqrt(d) * r_E, q + s) * (1.0 + w.weights.lpNorm<1>());
  out.noise = sigma * w.weights.norm() * std::sqrt(2.0 * std::log(2.0 / delta_t));
  return out;
}

double lp_confidence_width(const LpWeights& w, double L, double r_E, int q, double s, double sigma,
                           double delta_t) {
  return lp_width_terms(w, L, r_E, q, s, sigma, delta_t).total();
}

}  // namespace isobandit
