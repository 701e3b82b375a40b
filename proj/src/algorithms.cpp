#include "isobandit/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "isobandit/errors.hpp"
#include "isobandit/gp.hpp"
#include "isobandit/localpoly.hpp"
#include "isobandit/partition.hpp"
#include "isobandit/rng.hpp"

namespace isobandit {
namespace {

// Likelihood variance floor so zero-noise runs keep a well-posed posterior.
constexpr double kMinNoiseVariance = 1e-6;
constexpr int kMaxConsecutiveSplits = 100000;

double gp_noise_variance(double sigma) { return std::max(sigma * sigma, kMinNoiseVariance); }

Point uniform_in_cell(const Cell& cell, Philox4x32& rng) {
  Point x(cell.lower.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = std::min(1.0, cell.lower[k] + cell.side * rng.uniform01());
  return x;
}

void record_sample(RegretTrace& trace, const BanditOracle& oracle, TraceRow row) {
  const double prev = trace.rows.empty() ? 0.0 : trace.rows.back().cum_regret;
  row.inst_regret = oracle.last_regret();
  row.cum_regret = prev + row.inst_regret;
  row.step = static_cast<int>(oracle.query_count());
  trace.rows.push_back(std::move(row));
}

void record_split(RegretTrace& trace, const BanditOracle& oracle, TraceRow row) {
  row.decision = Decision::Split;
  row.inst_regret = 0.0;
  row.cum_regret = trace.rows.empty() ? 0.0 : trace.rows.back().cum_regret;
  row.step = static_cast<int>(oracle.query_count());
  trace.rows.push_back(std::move(row));
}

double gamma_at(const std::shared_ptr<const InfoGainSchedule>& gamma, int t) { return gamma ? gamma->at(t) : 0.0; }

void check_domain(const BanditOracle& oracle, int dim) {
  if (oracle.function().dim() != dim) throw ConfigError("oracle dimension does not match the kernel");
}

// Noise-only width of a cell mean over m samples.
double mean_width(double sigma, std::size_t m, double delta) {
  return sigma * std::sqrt(2.0 * std::log(2.0 / delta) / static_cast<double>(m));
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::LpGpUcb: return "lp-gp-ucb";
    case Algorithm::GpUcb: return "gp-ucb";
    case Algorithm::LocalPolyUcb: return "local-poly-ucb";
    case Algorithm::Uniform: return "uniform";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "lp-gp-ucb") return Algorithm::LpGpUcb;
  if (name == "gp-ucb") return Algorithm::GpUcb;
  if (name == "local-poly-ucb") return Algorithm::LocalPolyUcb;
  if (name == "uniform") return Algorithm::Uniform;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(U2Source source) {
  switch (source) {
    case U2Source::None: return "none";
    case U2Source::CellMean: return "cell-mean";
    case U2Source::LocalPoly: return "local-poly";
  }
  return "unknown";
}

double beta_n(const BetaSchedule& schedule, int t, double B, double sigma, double gamma_t, double delta) {
  if (t < 1) throw ConfigError("beta_n: t must be >= 1");
  if (schedule.kind == BetaSchedule::Kind::Constant) return schedule.constant;
  return B + sigma * std::sqrt(2.0 * (gamma_t + 1.0 + std::log(1.0 / delta)));
}

InfoGainSchedule::InfoGainSchedule(const InfoGainCurve& curve) : values_(curve.gamma_hat) {
  const std::size_t N = values_.size();
  if (N >= 4 && values_[N / 2 - 1] > 0.0 && values_[N - 1] > 0.0) {
    tail_exponent_ = std::log(values_[N - 1] / values_[N / 2 - 1]) /
                     std::log(static_cast<double>(N) / static_cast<double>(N / 2));
    tail_exponent_ = std::clamp(tail_exponent_, 0.0, 1.0);
  }
}

InfoGainSchedule InfoGainSchedule::for_kernel(const KernelSpec& kernel, double sigma2) {
  const int d = kernel.dim;
  const int g = d == 1 ? 512 : std::max(2, static_cast<int>(std::floor(std::pow(512.0, 1.0 / d) + 1e-9)));
  const PointList candidates = uniform_grid(g, d);
  const int n_max = std::min<int>(256, static_cast<int>(candidates.size()));
  return InfoGainSchedule(empirical_info_gain(kernel, sigma2, candidates, n_max));
}

double InfoGainSchedule::at(int t) const {
  if (values_.empty() || t < 1) return 0.0;
  const auto N = static_cast<int>(values_.size());
  if (t <= N) return values_[static_cast<std::size_t>(t - 1)];
  return values_.back() * std::pow(static_cast<double>(t) / N, tail_exponent_);
}

double default_holder_constant(const Kernel& kernel, double B, double alpha1) {
  const double r_max = std::sqrt(static_cast<double>(kernel.dim()));
  const double r_min = 1e-6;
  constexpr int kSteps = 4000;
  double best = 0.0;
  for (int i = 0; i <= kSteps; ++i) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / kSteps);
    const double gap = std::max(0.0, 1.0 - kernel(r) / kernel(0.0));
    best = std::max(best, std::sqrt(2.0 * gap * kernel(0.0)) / std::pow(r, alpha1));
  }
  return B * best;
}

double derivative_holder_constant(const Kernel& kernel, double B, int q, double s) {
  if (q == 0) return default_holder_constant(kernel, B, s);
  if (q < 0 || q > 3) throw ConfigError("derivative Holder constant: q must be in [0, 3]");
  const double l = kernel.spec().lengthscale;
  const double h = (q == 1 ? 1e-3 : q == 2 ? 1e-2 : 3e-2) * l;
  const int order = 2 * q;
  const auto D = [&](double r) {
    double acc = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= order; ++i) {
      acc += ((i % 2) ? -binom : binom) * kernel(std::abs(r + (q - i) * h));
      binom = binom * (order - i) / (i + 1);
    }
    return ((q % 2) ? -acc : acc) / std::pow(h, order);
  };
  const double d0 = D(0.0);
  const double r_max = std::sqrt(static_cast<double>(kernel.dim()));
  const double r_min = 10.0 * h;
  constexpr int kSteps = 2000;
  double best = 0.0;
  for (int i = 0; i <= kSteps; ++i) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / kSteps);
    best = std::max(best, std::sqrt(2.0 * std::max(0.0, d0 - D(r))) / std::pow(r, s));
  }
  return B * best;
}

double default_smoothness_constant(const Kernel& kernel, double B, const SmoothnessParams& smoothness) {
  const double first = default_holder_constant(kernel, B, smoothness.alpha1);
  if (smoothness.q == 0) return first;
  return std::max(first, derivative_holder_constant(kernel, B, smoothness.q, smoothness.s));
}

double LpGpUcbConfig::alpha1() const { return std::max(s, std::min(1.0, static_cast<double>(q))); }

LpGpUcbConfig LpGpUcbConfig::from_smoothness(const SmoothnessParams& smoothness, int n, double B, double sigma,
                                             double delta) {
  LpGpUcbConfig cfg;
  cfg.n = n;
  cfg.B = B;
  cfg.sigma = sigma;
  cfg.q = smoothness.q;
  cfg.s = smoothness.s;
  cfg.L = smoothness.L;
  cfg.delta = delta;
  return cfg;
}

void LpGpUcbConfig::validate(int dim) const {
  if (n < 0) throw ConfigError("lp-gp-ucb: budget must be >= 0");
  if (!(B > 0.0)) throw ConfigError("lp-gp-ucb: B must be > 0");
  if (!(sigma >= 0.0)) throw ConfigError("lp-gp-ucb: sigma must be >= 0");
  if (q < 0 || q > 3) throw ConfigError("lp-gp-ucb: q must be in [0, 3]");
  if (!(s > 0.0 && s <= 1.0)) throw ConfigError("lp-gp-ucb: s must be in (0, 1]");
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("lp-gp-ucb: L must be finite and > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("lp-gp-ucb: delta must be in (0, 1)");
  if (!(split_threshold_c > 0.0)) throw ConfigError("lp-gp-ucb: split threshold must be > 0");
  if (dim < 1) throw ConfigError("lp-gp-ucb: dim must be >= 1");
  if (beta_schedule.kind == BetaSchedule::Kind::TheoreticalRkhs && !gamma)
    throw ConfigError("lp-gp-ucb: the theoretical beta schedule needs an information-gain schedule");
}

std::string LpGpUcbConfig::describe() const {
  std::ostringstream os;
  os << std::setprecision(17) << "n=" << n << " B=" << B << " sigma=" << sigma << " q=" << q << " s=" << s
     << " L=" << L << " delta=" << delta << " beta="
     << (beta_schedule.kind == BetaSchedule::Kind::Constant ? "constant" : "theoretical");
  if (beta_schedule.kind == BetaSchedule::Kind::Constant) os << ':' << beta_schedule.constant;
  os << " split_c=" << split_threshold_c << " min_pts_lp=";
  if (min_pts_lp == kLpDisabled) {
    os << "disabled";
  } else {
    os << min_pts_lp;
  }
  os << " seed=" << seed;
  return os.str();
}

double UcbComponents::combine(double u0, double u1, double u2) {
  double best = std::numeric_limits<double>::infinity();
  for (const double u : {u0, u1, u2})
    if (!std::isnan(u)) best = std::min(best, u);
  return best;
}

std::vector<double> RegretTrace::per_step_regret() const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.decision == Decision::Sample) out.push_back(r.inst_regret);
  return out;
}

std::vector<double> RegretTrace::cum_regret() const {
  std::vector<double> out;
  double acc = 0.0;
  for (const double r : per_step_regret()) out.push_back(acc += r);
  return out;
}

std::size_t RegretTrace::query_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const TraceRow& r) { return r.decision == Decision::Sample; }));
}

void RegretTrace::write_csv(std::ostream& os) const {
  os << std::setprecision(17);
  os << "# schema=1\n";
  os << "# algorithm=" << to_string(algorithm) << " seed=" << seed << ' ' << config << '\n';
  os << "step,cell_id,decision";
  for (int k = 0; k < dim; ++k) os << ",x" << k;
  os << ",y,inst_regret,cum_regret,u0,u1,u2,overall\n";
  for (const auto& r : rows) {
    os << r.step << ',' << r.cell_id << ',' << (r.decision == Decision::Sample ? "sample" : "split");
    for (int k = 0; k < dim; ++k) os << ',' << r.x[k];
    os << ',' << r.y << ',' << r.inst_regret << ',' << r.cum_regret << ',' << r.ucb.u0 << ',' << r.ucb.u1 << ','
       << r.ucb.u2 << ',' << r.ucb.overall << '\n';
  }
}

RegretTrace run_lp_gp_ucb(BanditOracle& oracle, const KernelSpec& kernel, const LpGpUcbConfig& cfg) {
  kernel.validate();
  const int d = kernel.dim;
  cfg.validate(d);
  check_domain(oracle, d);

  RegretTrace trace;
  trace.algorithm = Algorithm::LpGpUcb;
  trace.config = kernel.describe() + ' ' + cfg.describe();
  trace.seed = cfg.seed;
  trace.dim = d;
  if (cfg.n == 0) return trace;

  const bool lp_enabled = cfg.min_pts_lp != LpGpUcbConfig::kLpDisabled;
  const std::size_t min_pts = cfg.min_pts_lp == 0 ? sufficient_count(cfg.q, d) : cfg.min_pts_lp;
  const double alpha1 = cfg.alpha1();
  const double root_d = std::sqrt(static_cast<double>(d));
  const auto variation = [&](double side) { return cfg.L * std::pow(root_d * side, alpha1); };

  GpPosterior gp(kernel, gp_noise_variance(cfg.sigma));
  Partition part(d);
  part.cell(0).u0 = cfg.B;
  ProbeCache probes(gp);
  probes.add(0, part.cell(0).center);
  Philox4x32 rng(cfg.seed, Stream::Algorithm);

  struct LpFit {
    std::size_t count = 0;  // data count the fit was computed for
    bool ok = false;
    LpWeights weights;
  };
  std::unordered_map<int, LpFit> lp_fits;

  struct Evaluated {
    UcbComponents ucb;
    double mean = 0.0;
    double std = 0.0;
    double variation = 0.0;
    double lp_noise = 0.0;
  };

  int consecutive_splits = 0;
  while (static_cast<int>(oracle.query_count()) < cfg.n) {
    probes.sync();
    const int t = static_cast<int>(oracle.query_count()) + 1;
    const double beta = beta_n(cfg.beta_schedule, t, cfg.B, cfg.sigma, gamma_at(cfg.gamma, t), cfg.delta / 3.0);

    const auto evaluate = [&](const Cell& cell) {
      Evaluated e;
      const Prediction p = probes.predict(cell.id);
      e.mean = p.mean;
      e.std = p.std;
      e.variation = variation(cell.side);
      e.ucb.u0 = cell.u0;
      e.ucb.u1 = p.mean + beta * p.std + e.variation;
      const std::size_t m = cell.data.size();
      if (lp_enabled && m > 0) {
        const double delta_t = cfg.delta / (3.0 * static_cast<double>(t) * t * std::ldexp(1.0, d) * (cell.depth + 1));
        bool lp_active = false;
        if (m >= min_pts && cell.side <= 0.5) {
          LpFit& fit = lp_fits[cell.id];
          if (fit.count != m) {
            fit.count = m;
            PointList xs;
            xs.reserve(m);
            for (const auto& o : cell.data) xs.push_back(o.x);
            try {
              fit.weights = solve_weights(xs, cell.center, cfg.q);
              fit.ok = true;
            } catch (const UnisolvencyError&) {
              fit.ok = false;
            }
          }
          if (fit.ok) {
            std::vector<double> ys;
            ys.reserve(m);
            for (const auto& o : cell.data) ys.push_back(o.y);
            const LpWidth w = lp_width_terms(fit.weights, cfg.L, cell.side, cfg.q, cfg.s, cfg.sigma, delta_t);
            e.ucb.u2 = lp_estimate(fit.weights, ys) + w.total() + e.variation;
            e.ucb.u2_source = U2Source::LocalPoly;
            e.lp_noise = w.noise;
            lp_active = true;
          }
        }
        if (!lp_active) {
          const CellStats st = cell_stats(cell);
          e.ucb.u2 = st.mean + mean_width(cfg.sigma, m, delta_t) + e.variation;
          e.ucb.u2_source = U2Source::CellMean;
        }
      }
      e.ucb.overall = UcbComponents::combine(e.ucb.u0, e.ucb.u1, e.ucb.u2);
      return e;
    };

    int chosen = -1;
    Evaluated best;
    for (const auto& cell : part.leaves()) {
      Evaluated e = evaluate(cell);
      if (chosen < 0 || e.ucb.overall > best.ucb.overall) {
        chosen = cell.id;
        best = e;
      }
    }

    Cell& cell = part.cell(chosen);
    TraceRow row;
    row.cell_id = chosen;
    row.ucb = best.ucb;
    row.cell_lower = cell.lower;
    row.cell_side = cell.side;
    row.beta = beta;
    row.mean = best.mean;
    row.std = best.std;
    row.variation = best.variation;

    const bool tight = beta * best.std + (best.ucb.u2_source == U2Source::LocalPoly ? best.lp_noise : 0.0) <=
                       cfg.split_threshold_c * best.variation;
    if (tight && cell.depth < Partition::kMaxDepth && consecutive_splits < kMaxConsecutiveSplits) {
      row.x = cell.center;
      const double child_u0 = std::min(cell.u0, best.ucb.overall);
      probes.remove(chosen);
      lp_fits.erase(chosen);
      for (const int child : part.split(chosen, child_u0)) probes.add(child, part.cell(child).center);
      record_split(trace, oracle, std::move(row));
      ++consecutive_splits;
      continue;
    }
    consecutive_splits = 0;

    const Point x = uniform_in_cell(cell, rng);
    const double y = oracle.query(x);
    try {
      gp.update(x, y);
    } catch (const FactorizationError& e) {
      throw std::runtime_error("lp-gp-ucb: GP factorization failed at step " + std::to_string(t) + ": " + e.what());
    }
    cell.u0 = std::min(cell.u0, best.ucb.overall);
    part.add_observation(x, y);
    row.x = x;
    row.y = y;
    record_sample(trace, oracle, std::move(row));
  }
  return trace;
}

RegretTrace run_gp_ucb(BanditOracle& oracle, const KernelSpec& kernel, int n, double B, double sigma,
                       const BetaSchedule& beta_schedule, const PointList& candidate_grid, double delta,
                       std::shared_ptr<const InfoGainSchedule> gamma) {
  kernel.validate();
  check_domain(oracle, kernel.dim);
  if (candidate_grid.empty()) throw ConfigError("gp-ucb: empty candidate grid");
  if (beta_schedule.kind == BetaSchedule::Kind::TheoreticalRkhs && !gamma)
    gamma = std::make_shared<const InfoGainSchedule>(InfoGainSchedule::for_kernel(kernel));

  RegretTrace trace;
  trace.algorithm = Algorithm::GpUcb;
  std::ostringstream cfg;
  cfg << std::setprecision(17) << kernel.describe() << " n=" << n << " B=" << B << " sigma=" << sigma
      << " delta=" << delta << " candidates=" << candidate_grid.size();
  trace.config = cfg.str();
  trace.dim = kernel.dim;

  GpPosterior gp(kernel, gp_noise_variance(sigma));
  ProbeCache probes(gp);
  for (std::size_t i = 0; i < candidate_grid.size(); ++i) probes.add(static_cast<int>(i), candidate_grid[i]);

  for (int t = 1; t <= n; ++t) {
    probes.sync();
    const double beta = beta_n(beta_schedule, t, B, sigma, gamma_at(gamma, t), delta);
    int chosen = -1;
    double best = -std::numeric_limits<double>::infinity();
    Prediction best_p;
    for (std::size_t i = 0; i < candidate_grid.size(); ++i) {
      const Prediction p = probes.predict(static_cast<int>(i));
      const double u = p.mean + beta * p.std;
      if (u > best) {
        best = u;
        chosen = static_cast<int>(i);
        best_p = p;
      }
    }
    const Point& x = candidate_grid[static_cast<std::size_t>(chosen)];
    const double y = oracle.query(x);
    try {
      gp.update(x, y);
    } catch (const FactorizationError& e) {
      throw std::runtime_error("gp-ucb: GP factorization failed at step " + std::to_string(t) + ": " + e.what());
    }
    TraceRow row;
    row.cell_id = chosen;
    row.x = x;
    row.y = y;
    row.ucb.u1 = best;
    row.ucb.overall = best;
    row.beta = beta;
    row.mean = best_p.mean;
    row.std = best_p.std;
    record_sample(trace, oracle, std::move(row));
  }
  return trace;
}

std::size_t phase_sample_count(double sigma, double L, double side, int dim, double alpha, double delta_j) {
  if (sigma == 0.0) return 1;
  const double target = L * std::pow(std::sqrt(static_cast<double>(dim)) * side, alpha);
  const double ratio = sigma / target;
  return static_cast<std::size_t>(std::ceil(ratio * ratio * 2.0 * std::log(2.0 / delta_j)));
}

RegretTrace run_local_poly_ucb(BanditOracle& oracle, const SmoothnessParams& smoothness, int n, double sigma,
                               double delta, std::uint64_t seed) {
  const int d = oracle.function().dim();
  if (!(smoothness.alpha > 0.0) || !(smoothness.L > 0.0)) throw ConfigError("local-poly-ucb: invalid smoothness");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("local-poly-ucb: delta must be in (0, 1)");
  if (n < 0) throw ConfigError("local-poly-ucb: budget must be >= 0");

  RegretTrace trace;
  trace.algorithm = Algorithm::LocalPolyUcb;
  std::ostringstream cfg;
  cfg << std::setprecision(17) << "alpha=" << smoothness.alpha << " q=" << smoothness.q << " L=" << smoothness.L
      << " n=" << n << " sigma=" << sigma << " delta=" << delta;
  trace.config = cfg.str();
  trace.seed = seed;
  trace.dim = d;

  const int q = smoothness.q;
  const double alpha = smoothness.alpha;
  const double L = smoothness.L;
  const double root_d = std::sqrt(static_cast<double>(d));
  Partition part(d);
  Philox4x32 rng(seed, Stream::Algorithm);
  std::vector<int> active{0};

  const auto sample = [&](const Cell& cell) {
    const Point x = uniform_in_cell(cell, rng);
    const double y = oracle.query(x);
    const int at = part.add_observation(x, y);
    TraceRow row;
    row.cell_id = at;
    row.x = x;
    row.y = y;
    row.cell_lower = cell.lower;
    row.cell_side = cell.side;
    record_sample(trace, oracle, std::move(row));
  };
  const auto budget_left = [&] { return static_cast<int>(oracle.query_count()) < n; };

  for (int phase = 0; budget_left(); ++phase) {
    const double delta_j = delta / (2.0 * (phase + 1.0) * (phase + 1.0) * std::ldexp(1.0, d * phase));
    struct Interval {
      int id;
      double ucb;
      double lcb;
    };
    std::vector<Interval> bounds;
    for (const int id : active) {
      const Cell& cell0 = part.cell(id);
      const double target = L * std::pow(root_d * cell0.side, alpha);
      std::size_t need = phase_sample_count(sigma, L, cell0.side, d, alpha, delta_j);
      if (q > 0) need = std::max(need, sufficient_count(q, d));
      while (part.cell(id).data.size() < need && budget_left()) sample(part.cell(id));

      PointList xs;
      std::vector<double> ys;
      const auto gather = [&] {
        xs.clear();
        ys.clear();
        for (const auto& o : part.cell(id).data) {
          xs.push_back(o.x);
          ys.push_back(o.y);
        }
      };
      gather();
      const Cell& cell = part.cell(id);
      // Bounds on sup_E f. A plain mean m of samples in E satisfies
      // m <= sup_E f <= m + L (sqrt(d) r)^alpha; higher degrees bound f(center).
      double upper = std::numeric_limits<double>::infinity();
      double lower = -std::numeric_limits<double>::infinity();
      if (!xs.empty()) {
        try {
          LpWeights w = solve_weights(xs, cell.center, q);
          LpWidth lw = lp_width_terms(w, L, cell.side, q, smoothness.s, sigma, delta_j);
          // Higher degrees spread weight unevenly; top up until the noise term meets the target.
          while (q > 0 && lw.noise > target && budget_left()) {
            const std::size_t grow = std::max<std::size_t>(1, xs.size() / 2);
            for (std::size_t i = 0; i < grow && budget_left(); ++i) sample(cell);
            gather();
            w = solve_weights(xs, cell.center, q);
            lw = lp_width_terms(w, L, cell.side, q, smoothness.s, sigma, delta_j);
          }
          const double est = lp_estimate(w, ys);
          const double spread = q == 0 ? lw.noise : lw.total();
          upper = est + spread + target;
          lower = est - spread;
        } catch (const UnisolvencyError&) {
          double acc = 0.0;
          for (const double y : ys) acc += y;
          const double est = acc / static_cast<double>(ys.size());
          const double noise = mean_width(sigma, ys.size(), delta_j);
          upper = est + noise + target;
          lower = est - noise;
        }
      }
      bounds.push_back({id, upper, lower});
    }
    if (!budget_left()) break;

    double best_lcb = -std::numeric_limits<double>::infinity();
    for (const auto& b : bounds) best_lcb = std::max(best_lcb, b.lcb);
    std::vector<int> next;
    for (const auto& b : bounds) {
      if (b.ucb < best_lcb) continue;
      const Cell& cell = part.cell(b.id);
      if (cell.depth >= Partition::kMaxDepth) {
        next.push_back(b.id);
        continue;
      }
      TraceRow row;
      row.cell_id = b.id;
      row.x = cell.center;
      row.cell_lower = cell.lower;
      row.cell_side = cell.side;
      row.ucb.u2 = b.ucb;
      row.ucb.overall = b.ucb;
      record_split(trace, oracle, std::move(row));
      for (const int child : part.split(b.id)) next.push_back(child);
    }
    active = std::move(next);
  }
  return trace;
}

RegretTrace run_uniform(BanditOracle& oracle, int n, std::uint64_t seed) {
  if (n < 0) throw ConfigError("uniform: budget must be >= 0");
  RegretTrace trace;
  trace.algorithm = Algorithm::Uniform;
  trace.config = "n=" + std::to_string(n);
  trace.seed = seed;
  const int d = oracle.function().dim();
  trace.dim = d;
  Philox4x32 rng(seed, Stream::Algorithm);
  for (int t = 0; t < n; ++t) {
    Point x(d);
    for (int k = 0; k < d; ++k) x[k] = rng.uniform01();
    const double y = oracle.query(x);
    TraceRow row;
    row.x = x;
    row.y = y;
    record_sample(trace, oracle, std::move(row));
  }
  return trace;
}

}  // namespace isobandit
