#include "isobandit/gp.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "isobandit/errors.hpp"

namespace isobandit {

void GpState::write(std::ostream& os) const {
  os << std::setprecision(17);
  os << "gp_state " << points.size() << ' ' << sigma2 << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (Eigen::Index k = 0; k < points[i].size(); ++k) os << points[i][k] << ' ';
    os << targets[i] << '\n';
  }
}

GpState GpState::read(std::istream& is, int dim) {
  std::string tag;
  std::size_t n = 0;
  GpState s;
  if (!(is >> tag >> n >> s.sigma2) || tag != "gp_state") throw ConfigError("gp_state: malformed header");
  s.points.reserve(n);
  s.targets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point p(dim);
    for (int k = 0; k < dim; ++k)
      if (!(is >> p[k])) throw ConfigError("gp_state: truncated record");
    double y = 0.0;
    if (!(is >> y)) throw ConfigError("gp_state: truncated record");
    s.points.push_back(std::move(p));
    s.targets.push_back(y);
  }
  return s;
}

GpPosterior::GpPosterior(const KernelSpec& kernel, double sigma2) : kernel_(kernel), sigma2_(sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ConfigError("gp: sigma2 must be positive");
}

GpPosterior GpPosterior::restore(const KernelSpec& kernel, const GpState& state) {
  if (state.points.size() != state.targets.size()) throw ConfigError("gp_state: points/targets mismatch");
  GpPosterior gp(kernel, state.sigma2);
  for (std::size_t i = 0; i < state.points.size(); ++i) gp.update(state.points[i], state.targets[i]);
  return gp;
}

void GpPosterior::forward_solve(const double* rhs, double* out, std::size_t n) const {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = factor_row(i);
    double acc = rhs[i];
    for (std::size_t k = 0; k < i; ++k) acc -= row[k] * out[k];
    out[i] = acc / row[i];
  }
}

bool GpPosterior::append_row(const Point& x, double y) {
  const std::size_t n = whitened_.size();
  std::vector<double> cross(n);
  for (std::size_t j = 0; j < n; ++j) cross[j] = kernel_(points_[j], x);
  std::vector<double> row(n + 1);
  forward_solve(cross.data(), row.data(), n);
  double pivot = kernel_(x, x) + sigma2_ + jitter_;
  double proj = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    pivot -= row[j] * row[j];
    proj += row[j] * whitened_[j];
  }
  if (!(pivot > 0.0) || !std::isfinite(pivot)) return false;
  row[n] = std::sqrt(pivot);
  packed_.insert(packed_.end(), row.begin(), row.end());
  whitened_.push_back((y - proj) / row[n]);
  return true;
}

void GpPosterior::rebuild() {
  packed_.clear();
  whitened_.clear();
  ++epoch_;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!append_row(points_[i], targets_[i])) throw FactorizationError("gp: rebuild breakdown");
  }
}

void GpPosterior::update(const Point& x, double y) {
  if (x.size() != kernel_.dim()) throw std::invalid_argument("gp: point dimension mismatch");
  if (!std::isfinite(y)) throw std::invalid_argument("gp: observation must be finite");
  points_.push_back(x);
  targets_.push_back(y);
  if (append_row(x, y)) return;

  const double original = jitter_;
  while (jitter_ * 10.0 <= kMaxJitter * (1.0 + 1e-12)) {
    jitter_ *= 10.0;
    try {
      rebuild();
      return;
    } catch (const FactorizationError&) {
    }
  }
  points_.pop_back();
  targets_.pop_back();
  jitter_ = original;
  rebuild();
  throw FactorizationError("gp: Cholesky breakdown persists at jitter 1e-6");
}

GpPosterior GpPosterior::updated(const Point& x, double y) const {
  GpPosterior next = *this;
  next.update(x, y);
  return next;
}

Eigen::VectorXd GpPosterior::whitened_cross(const Point& x) const {
  const std::size_t n = size();
  std::vector<double> cross(n);
  for (std::size_t j = 0; j < n; ++j) cross[j] = kernel_(points_[j], x);
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  forward_solve(cross.data(), out.data(), n);
  return out;
}

Prediction GpPosterior::predict(const Point& x) const {
  if (x.size() != kernel_.dim()) throw std::invalid_argument("gp: point dimension mismatch");
  const Eigen::VectorXd v = whitened_cross(x);
  const Eigen::Map<const Eigen::VectorXd> z(whitened_.data(), static_cast<Eigen::Index>(whitened_.size()));
  const double var = kernel_(x, x) - v.squaredNorm();
  return {v.dot(z), std::sqrt(std::max(var, 0.0))};
}

std::vector<Prediction> GpPosterior::predict(const PointList& xs) const {
  std::vector<Prediction> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(predict(x));
  return out;
}

Eigen::MatrixXd GpPosterior::cholesky_factor() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* row = factor_row(static_cast<std::size_t>(i));
    for (Eigen::Index k = 0; k <= i; ++k) L(i, k) = row[k];
  }
  return L;
}

void ProbeCache::refresh(Probe& probe) const {
  probe.whitened.clear();
  probe.mean = 0.0;
  probe.explained = 0.0;
  probe.prior = gp_->kernel()(probe.point, probe.point);
  extend(probe);
}

void ProbeCache::extend(Probe& probe) const {
  const std::size_t n = gp_->size();
  const auto& pts = gp_->points();
  for (std::size_t i = probe.whitened.size(); i < n; ++i) {
    const double* row = gp_->factor_row(i);
    double acc = gp_->kernel()(pts[i], probe.point);
    for (std::size_t k = 0; k < i; ++k) acc -= row[k] * probe.whitened[k];
    const double v = acc / row[i];
    probe.whitened.push_back(v);
    probe.mean += v * gp_->whitened_target(i);
    probe.explained += v * v;
  }
}

void ProbeCache::add(int key, const Point& p) {
  Probe probe;
  probe.point = p;
  if (epoch_ == gp_->epoch()) {
    refresh(probe);
  }
  probes_[key] = std::move(probe);
}

void ProbeCache::remove(int key) { probes_.erase(key); }

void ProbeCache::sync() {
  if (epoch_ != gp_->epoch()) {
    epoch_ = gp_->epoch();
    for (auto& [key, probe] : probes_) refresh(probe);
    return;
  }
  for (auto& [key, probe] : probes_) extend(probe);
}

Prediction ProbeCache::predict(int key) const {
  const auto it = probes_.find(key);
  if (it == probes_.end()) throw std::out_of_range("probe cache: unknown key");
  const auto& probe = it->second;
  if (probe.whitened.size() != gp_->size() || epoch_ != gp_->epoch())
    throw std::logic_error("probe cache: predict before sync");
  return {probe.mean, std::sqrt(std::max(probe.prior - probe.explained, 0.0))};
}

}  // namespace isobandit
