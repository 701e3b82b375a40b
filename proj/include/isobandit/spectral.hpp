#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isobandit/kernels.hpp"

namespace isobandit {

// Fourier transforms use k_hat(w) = int k(|x|) exp(-i <w, x>) dx over R^d
// (non-unitary, angular frequency).
struct FourierSamples {
  std::vector<double> omegas;
  std::vector<double> values;
  int dim = 1;
  double quadrature_tol = 1e-10;
  std::vector<double> residuals;  // per-sample error estimate (0 for closed forms)
};

struct FourierOptions {
  double quadrature_tol = 1e-10;
  bool force_quadrature = false;
  // Gaussian window exp(-r^2 / 2W^2) applied to the Dirichlet kernel, whose
  // transform on R is a line spectrum at multiples of 1/l.
  double dirichlet_window = 20.0;
};

/// k_hat at each omega (omegas non-negative and strictly increasing).
/// SE and Matern use closed forms in any d unless force_quadrature is set;
/// the quadrature path supports d = 1 (cosine transform) and d = 3
/// (sine-transform identity). Throws ConfigError for other d, and
/// QuadratureError when an integral misses quadrature_tol.
FourierSamples radial_fourier(const KernelSpec& spec, std::span<const double> omegas, int d,
                              const FourierOptions& options = {});

struct DecayFit {
  double tau_hat = 0.0;  // negated slope of log k_hat against log(1 + w)
  DecayKind verdict = DecayKind::Polynomial;
  double r2_loglog = 0.0;
  double r2_semilog = 0.0;
  std::size_t samples_used = 0;
  double omega_cut = 0.0;  // last omega kept before the noise floor
};

/// Least-squares decay fit over samples with omega in [omega_min, omega_max].
/// The tail is truncated at the first sample below 1e3 * eps * k_hat(omega_min).
/// A tail that stays below vanish_level everywhere is reported as
/// CompactSupport without a slope. Throws std::invalid_argument when fewer
/// than 20 samples survive or a kept value is non-positive.
DecayFit fit_decay_slope(const FourierSamples& samples, double omega_min,
                         double omega_max = std::numeric_limits<double>::infinity(),
                         double vanish_level = 1e-10);

struct EigenEstimate {
  std::vector<double> eigenvalues;  // non-increasing
  int grid_size = 0;                // points per axis
  double cell_volume = 1.0;
};

/// Nystrom estimate of the Mercer eigenvalues on the endpoint-inclusive
/// uniform grid of [0,1]^d (a single point sits at the center). Throws
/// ConfigError when grid_per_axis^d exceeds 4096.
EigenEstimate nystrom_eigs(const KernelSpec& spec, int grid_per_axis, int d);

/// psi^2 * sum_{m > D} lambda_m over the estimated spectrum (a lower estimate
/// of the true tail).
double tail_mass(const EigenEstimate& est, std::size_t D, double psi = 1.0);

/// Least-squares slope of log lambda_m against log m for 1-based m in
/// [m_lo, m_hi].
double eigen_decay_slope(const EigenEstimate& est, std::size_t m_lo, std::size_t m_hi);

struct InfoGainCurve {
  std::vector<int> n_values;
  std::vector<double> gamma_hat;
  std::vector<std::size_t> selected;  // candidate indices in selection order
  double sigma2 = 1.0;
  std::size_t candidate_count = 0;
};

/// Greedy maximization of 0.5 log det(I + K_S / sigma2) over distinct
/// candidates; gamma_hat[i] is the value after i + 1 selections.
InfoGainCurve empirical_info_gain(const KernelSpec& spec, double sigma2, const PointList& candidates,
                                  int n_max);

struct InfoGainExponent {
  double n_exponent = 0.0;    // gamma_n = O(n^a log^b n)
  double log_exponent = 0.0;
  bool improved_regime = false;
  bool applicable = true;     // false where the bound needs an excluded case
};

InfoGainExponent info_gain_bound_exponent(const KernelSpec& spec);

/// Uniform grid of g^d points covering [0,1]^d, endpoints included.
PointList uniform_grid(int grid_per_axis, int d);

}  // namespace isobandit
