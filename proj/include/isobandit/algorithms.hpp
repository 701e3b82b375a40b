#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "isobandit/envs.hpp"
#include "isobandit/kernels.hpp"
#include "isobandit/spectral.hpp"

namespace isobandit {

enum class Algorithm { LpGpUcb, GpUcb, LocalPolyUcb, Uniform };
std::string_view to_string(Algorithm algorithm);
// Accepts lp-gp-ucb, gp-ucb, local-poly-ucb, uniform.
Algorithm parse_algorithm(std::string_view name);

struct BetaSchedule {
  enum class Kind { TheoreticalRkhs, Constant };
  Kind kind = Kind::TheoreticalRkhs;
  double constant = 2.0;

  static BetaSchedule theoretical() { return {}; }
  static BetaSchedule fixed(double c) { return {Kind::Constant, c}; }
};

/// TheoreticalRkhs: B + sigma sqrt(2 (gamma_t + 1 + log(1 / delta))).
/// Constant(c): c. Throws ConfigError for t < 1.
double beta_n(const BetaSchedule& schedule, int t, double B, double sigma, double gamma_t, double delta);

/// Information-gain estimate gamma_t from a greedy curve, extended past the
/// curve with the power law fitted over its upper half.
class InfoGainSchedule {
 public:
  explicit InfoGainSchedule(const InfoGainCurve& curve);
  /// Greedy curve on a 512-point grid (the nearest g^d <= 512 in d >= 2),
  /// n_max = 256, at unit regularization sigma2 = 1 by default.
  static InfoGainSchedule for_kernel(const KernelSpec& kernel, double sigma2 = 1.0);

  double at(int t) const;

 private:
  std::vector<double> values_;  // values_[i] = gamma at n = i + 1
  double tail_exponent_ = 0.0;
};

/// sup_{0 < r <= sqrt(d)} B sqrt(2 (1 - k(r))) / r^alpha1: a Holder constant
/// valid for every f with ||f||_k <= B, since |f(x) - f(y)| <= B ||k_x - k_y||.
double default_holder_constant(const Kernel& kernel, double B, double alpha1);

/// Same bound for the order-q derivative along a line:
/// sup_r B sqrt(2 (D(0) - D(r))) / r^s with D = (-1)^q k^{(2q)}, the
/// derivative taken by central differences on the radial profile.
double derivative_holder_constant(const Kernel& kernel, double B, int q, double s);

/// One L serving both the cell-variation term (order 0, exponent alpha1)
/// and the local-polynomial bias (order q, exponent s): the larger of the two.
double default_smoothness_constant(const Kernel& kernel, double B, const SmoothnessParams& smoothness);

struct LpGpUcbConfig {
  static constexpr std::size_t kLpDisabled = std::numeric_limits<std::size_t>::max();

  int n = 0;
  double B = 1.0;
  double sigma = 0.1;
  int q = 0;
  double s = 1.0;
  double L = 1.0;
  double delta = 0.05;
  BetaSchedule beta_schedule;
  double split_threshold_c = 1.0;
  std::size_t min_pts_lp = 0;  // 0: (q + 2)^d; kLpDisabled: no u2 at all
  std::uint64_t seed = 0;      // algorithm stream
  std::shared_ptr<const InfoGainSchedule> gamma;  // required for TheoreticalRkhs

  double alpha1() const;
  /// Fills q, s and L from the smoothness parameters.
  static LpGpUcbConfig from_smoothness(const SmoothnessParams& smoothness, int n, double B, double sigma,
                                       double delta);
  void validate(int dim) const;
  std::string describe() const;
};

/// Which estimator fed u2 at a logged step.
enum class U2Source { None, CellMean, LocalPoly };
std::string_view to_string(U2Source source);

struct UcbComponents {
  double u0 = std::numeric_limits<double>::infinity();
  double u1 = std::numeric_limits<double>::quiet_NaN();
  double u2 = std::numeric_limits<double>::quiet_NaN();
  double overall = std::numeric_limits<double>::infinity();
  U2Source u2_source = U2Source::None;

  /// min of the finite components.
  static double combine(double u0, double u1, double u2);
};

enum class Decision { Sample, Split };

struct TraceRow {
  int step = 0;  // number of queries issued so far, including this one
  int cell_id = -1;
  Decision decision = Decision::Sample;
  Point x;
  double y = std::numeric_limits<double>::quiet_NaN();
  double inst_regret = 0.0;
  double cum_regret = 0.0;
  UcbComponents ucb;
  // Cell geometry for offline checks (not part of the CSV).
  Point cell_lower;
  double cell_side = 1.0;
  // u1 parts, so u1 is recomputable from the log.
  double beta = std::numeric_limits<double>::quiet_NaN();
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std = std::numeric_limits<double>::quiet_NaN();
  double variation = std::numeric_limits<double>::quiet_NaN();
};

struct RegretTrace {
  Algorithm algorithm = Algorithm::Uniform;
  std::string config;
  std::uint64_t seed = 0;
  int dim = 1;
  std::vector<TraceRow> rows;

  std::vector<double> per_step_regret() const;
  /// Prefix sums of per_step_regret.
  std::vector<double> cum_regret() const;
  std::size_t query_count() const;

  /// `# schema=1`, `# algorithm=...`, header, then one row per action.
  void write_csv(std::ostream& os) const;
};

/// Adaptive dyadic partition with GP, Holder and local-polynomial upper
/// bounds combined by a minimum. Throws ConfigError on an invalid
/// configuration and std::runtime_error if the GP factorization fails.
RegretTrace run_lp_gp_ucb(BanditOracle& oracle, const KernelSpec& kernel, const LpGpUcbConfig& cfg);

/// GP-UCB over a fixed candidate grid; ties go to the lowest index.
RegretTrace run_gp_ucb(BanditOracle& oracle, const KernelSpec& kernel, int n, double B, double sigma,
                       const BetaSchedule& beta_schedule, const PointList& candidate_grid, double delta = 0.05,
                       std::shared_ptr<const InfoGainSchedule> gamma = nullptr);

/// Phased elimination over the dyadic partition with local-polynomial
/// estimates at cell centers.
RegretTrace run_local_poly_ucb(BanditOracle& oracle, const SmoothnessParams& smoothness, int n, double sigma,
                               double delta, std::uint64_t seed);

/// Per-cell sample count making the q = 0 noise width sigma sqrt(2 log(2 /
/// delta_j) / m) at most L (sqrt(d) r)^alpha.
std::size_t phase_sample_count(double sigma, double L, double side, int dim, double alpha, double delta_j);

RegretTrace run_uniform(BanditOracle& oracle, int n, std::uint64_t seed);

}  // namespace isobandit
