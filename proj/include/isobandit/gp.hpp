#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "isobandit/kernels.hpp"

namespace isobandit {

struct Prediction {
  double mean = 0.0;
  double std = 0.0;
};

/// Observations needed to rebuild a posterior; the factor is recomputed on
/// load.
struct GpState {
  PointList points;
  std::vector<double> targets;
  double sigma2 = 1.0;

  void write(std::ostream& os) const;
  static GpState read(std::istream& is, int dim);
};

/// Zero-mean GP posterior over a fixed kernel with Gaussian likelihood of
/// variance sigma2. The factor L satisfies L L^T = K + (sigma2 + jitter) I,
/// stored packed by rows; each observation appends one row.
class GpPosterior {
 public:
  static constexpr double kInitialJitter = 1e-10;
  static constexpr double kMaxJitter = 1e-6;

  /// Throws ConfigError unless sigma2 > 0.
  GpPosterior(const KernelSpec& kernel, double sigma2);

  static GpPosterior restore(const KernelSpec& kernel, const GpState& state);

  /// Conditions on one more observation. On a non-positive pivot the jitter
  /// grows tenfold (up to kMaxJitter) and the factor is rebuilt; past that
  /// FactorizationError is thrown and the posterior is left unchanged.
  void update(const Point& x, double y);
  GpPosterior updated(const Point& x, double y) const;

  Prediction predict(const Point& x) const;
  std::vector<Prediction> predict(const PointList& xs) const;

  std::size_t size() const { return points_.size(); }
  const Kernel& kernel() const { return kernel_; }
  const PointList& points() const { return points_; }
  const std::vector<double>& targets() const { return targets_; }
  double sigma2() const { return sigma2_; }
  double jitter() const { return jitter_; }
  /// Incremented whenever the factor is rebuilt; caches keyed on rows use it.
  std::uint64_t epoch() const { return epoch_; }
  GpState state() const { return {points_, targets_, sigma2_}; }

  /// Dense copy of the lower factor (for tests and diagnostics).
  Eigen::MatrixXd cholesky_factor() const;

  /// Row i of the factor, length i + 1.
  const double* factor_row(std::size_t i) const { return packed_.data() + i * (i + 1) / 2; }
  /// Entry i of L^{-1} y.
  double whitened_target(std::size_t i) const { return whitened_[i]; }

  /// L^{-1} k_X(x) over all observations.
  Eigen::VectorXd whitened_cross(const Point& x) const;

 private:
  // Forward solve against the first n rows; out must have size n.
  void forward_solve(const double* rhs, double* out, std::size_t n) const;
  bool append_row(const Point& x, double y);
  void rebuild();

  Kernel kernel_;
  double sigma2_;
  double jitter_ = kInitialJitter;
  std::uint64_t epoch_ = 0;
  PointList points_;
  std::vector<double> targets_;
  std::vector<double> packed_;
  std::vector<double> whitened_;
};

/// Keeps L^{-1} k_X(p) for a set of keyed probe points in sync with a
/// posterior at O(n) per probe per observation, so repeated predictions at
/// fixed locations (leaf centers, candidate grids) avoid the O(n^2) solve.
class ProbeCache {
 public:
  explicit ProbeCache(const GpPosterior& gp) : gp_(&gp) {}

  void add(int key, const Point& p);
  void remove(int key);
  bool contains(int key) const { return probes_.count(key) != 0; }
  std::size_t count() const { return probes_.size(); }

  /// Brings every probe up to date with the posterior.
  void sync();
  /// Prediction for a synced probe.
  Prediction predict(int key) const;

 private:
  struct Probe {
    Point point;
    std::vector<double> whitened;
    double mean = 0.0;
    double explained = 0.0;  // squared norm of whitened
    double prior = 1.0;
  };
  void refresh(Probe& probe) const;
  void extend(Probe& probe) const;

  const GpPosterior* gp_;
  std::uint64_t epoch_ = 0;
  std::unordered_map<int, Probe> probes_;
};

}  // namespace isobandit
