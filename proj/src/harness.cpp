#include "isobandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <toml.hpp>

#include "isobandit/errors.hpp"
#include "isobandit/spectral.hpp"

namespace isobandit {
namespace {

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

int grid_for_dim(int d) {
  return d == 1 ? 512 : std::max(2, static_cast<int>(std::floor(std::pow(512.0, 1.0 / d) + 1e-9)));
}

std::filesystem::path trace_path(const ExperimentPlan& plan, const KernelSpec& kernel, Algorithm algorithm,
                                 std::uint64_t seed, int budget) {
  std::ostringstream name;
  name << to_string(algorithm) << "-n" << budget << "-seed" << seed << ".csv";
  return plan.output_dir / "traces" / kernel.tag() / name.str();
}

// Plan error wrapper for toml++ value access.
template <typename T>
T get_or(const toml::table& t, std::string_view key, T fallback) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = node->value<double>()) return *v;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (auto v = node->value<bool>()) return *v;
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = node->value<std::string>()) return *v;
  } else {
    if (auto v = node->value<std::int64_t>()) return static_cast<T>(*v);
  }
  throw ConfigError("plan: key '" + std::string(key) + "' has the wrong type");
}

void check_keys(const toml::table& t, std::initializer_list<std::string_view> allowed, std::string_view where) {
  for (const auto& [key, value] : t) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key.str()) == allowed.end())
      throw ConfigError("plan: unknown key '" + std::string(key.str()) + "' in " + std::string(where));
  }
}

KernelSpec parse_kernel_table(const toml::table& t) {
  check_keys(t, {"family", "lengthscale", "nu", "a", "gamma", "q", "m", "dim"}, "[[kernel]]");
  KernelSpec k;
  if (!t.contains("family")) throw ConfigError("plan: [[kernel]] needs a family");
  k.family = parse_family(get_or<std::string>(t, "family", ""));
  k.lengthscale = get_or<double>(t, "lengthscale", k.lengthscale);
  k.nu = get_or<double>(t, "nu", k.nu);
  k.a = get_or<double>(t, "a", k.a);
  k.gamma = get_or<double>(t, "gamma", k.gamma);
  k.q_pp = get_or<int>(t, "q", k.q_pp);
  k.m_dir = get_or<int>(t, "m", k.m_dir);
  k.dim = get_or<int>(t, "dim", k.dim);
  k.validate();
  return k;
}

template <typename T>
std::vector<T> int_array(const toml::table& t, std::string_view key) {
  std::vector<T> out;
  const auto* node = t.get(key);
  if (!node) return out;
  const auto* arr = node->as_array();
  if (!arr) throw ConfigError("plan: '" + std::string(key) + "' must be an array");
  for (const auto& el : *arr) {
    const auto v = el.value<std::int64_t>();
    if (!v || *v < 0) throw ConfigError("plan: '" + std::string(key) + "' entries must be non-negative integers");
    out.push_back(static_cast<T>(*v));
  }
  return out;
}

// Shortest round-trip rendering.
std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

std::string kernel_toml(const KernelSpec& k) {
  std::ostringstream os;
  os << "[[kernel]]\nfamily = \"" << to_string(k.family) << "\"\nlengthscale = " << exact(k.lengthscale) << '\n';
  switch (k.family) {
    case KernelFamily::Matern: os << "nu = " << exact(k.nu) << '\n'; break;
    case KernelFamily::RationalQuad: os << "a = " << exact(k.a) << '\n'; break;
    case KernelFamily::GammaExp: os << "gamma = " << exact(k.gamma) << '\n'; break;
    case KernelFamily::PiecewisePoly: os << "q = " << k.q_pp << '\n'; break;
    case KernelFamily::Dirichlet: os << "m = " << k.m_dir << '\n'; break;
    case KernelFamily::SquareExp: break;
  }
  os << "dim = " << k.dim << '\n';
  return os.str();
}

}  // namespace

std::string_view to_string(BoundSource source) {
  switch (source) {
    case BoundSource::RegretTable: return "regret-table";
    case BoundSource::GeneralBound: return "general-bound";
  }
  return "unknown";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "Pass";
    case Verdict::Fail: return "Fail";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

std::string table_row(const KernelSpec& kernel) {
  switch (kernel.family) {
    case KernelFamily::SquareExp: return "SE";
    case KernelFamily::Matern: return kernel.nu <= 1.0 ? "Matern nu<=1" : "Matern nu>1";
    case KernelFamily::RationalQuad: return "RQ";
    case KernelFamily::GammaExp: return "gamma-exp";
    case KernelFamily::PiecewisePoly: return "PP-q";
    case KernelFamily::Dirichlet: return "PBL";
  }
  return "unknown";
}

TargetExponent target_exponent(const KernelSpec& kernel, Algorithm algorithm) {
  kernel.validate();
  const double d = kernel.dim;
  TargetExponent t;
  if (algorithm == Algorithm::Uniform) return t;
  const bool smooth = kernel.family == KernelFamily::SquareExp || kernel.family == KernelFamily::RationalQuad ||
                      kernel.family == KernelFamily::Dirichlet;
  if (smooth) {
    t.exponent = 0.5;
    return t;
  }
  switch (algorithm) {
    case Algorithm::GpUcb:
      switch (kernel.family) {
        case KernelFamily::Matern: {
          const double nu = kernel.nu;
          t.exponent = nu <= 1.0 ? (2 * nu + d) / (4 * nu) : (nu + d) / (2 * nu + d);
          break;
        }
        case KernelFamily::GammaExp: t.exponent = (kernel.gamma + d) / (2 * kernel.gamma); break;
        case KernelFamily::PiecewisePoly: t.dne = true; break;
        default: break;
      }
      break;
    case Algorithm::LocalPolyUcb:
      switch (kernel.family) {
        case KernelFamily::Matern: t.exponent = (kernel.nu + d) / (2 * kernel.nu + d); break;
        case KernelFamily::GammaExp: t.exponent = (kernel.gamma + 2 * d) / (2 * kernel.gamma + 2 * d); break;
        case KernelFamily::PiecewisePoly: {
          const double q = kernel.q_pp;
          t.exponent = (2 * q + 1 + 2 * d) / (4 * q + 2 + 2 * d);
          break;
        }
        default: break;
      }
      break;
    case Algorithm::LpGpUcb:
      switch (kernel.family) {
        case KernelFamily::Matern: {
          const double nu = kernel.nu;
          t.exponent = nu <= 1.0 ? (nu + d) / (2 * nu + d) : (2 * nu + 3 * d) / (4 * nu + 2 * d);
          break;
        }
        case KernelFamily::GammaExp: t.exponent = (kernel.gamma + 2 * d) / (2 * kernel.gamma + 2 * d); break;
        case KernelFamily::PiecewisePoly: {
          const double q = kernel.q_pp;
          if (q == 0) {
            // Spectral excess beta = 1 <= 2 falls in the first regime of the general bound.
            const double beta = 1.0;
            t.exponent = (beta + 2 * d) / (2 * beta + 2 * d);
            t.source = BoundSource::GeneralBound;
          } else {
            t.exponent = (2 * q + d) / (2 * q + 1 + d);
          }
          break;
        }
        default: break;
      }
      break;
    case Algorithm::Uniform: break;
  }
  return t;
}

std::vector<int> dyadic_checkpoints(int lo, int hi) {
  std::vector<int> out;
  if (lo < 1) lo = 1;
  for (long long n = lo; n <= hi; n *= 2) out.push_back(static_cast<int>(n));
  return out;
}

SlopeFit fit_regret_slope(const std::vector<std::vector<double>>& cum_regrets, std::pair<int, int> window) {
  if (cum_regrets.size() < 3) throw ConfigError("fit_regret_slope: need at least 3 traces");
  std::size_t shortest = cum_regrets.front().size();
  for (const auto& c : cum_regrets) shortest = std::min(shortest, c.size());
  if (window.first < 1 || window.second < window.first || static_cast<std::size_t>(window.second) > shortest)
    throw ConfigError("fit_regret_slope: window outside the budget");

  SlopeFit fit;
  fit.checkpoints = dyadic_checkpoints(window.first, window.second);
  if (fit.checkpoints.size() < 2) throw ConfigError("fit_regret_slope: window holds fewer than 2 checkpoints");
  std::vector<double> logn;
  for (const int n : fit.checkpoints) {
    double acc = 0.0;
    for (const auto& c : cum_regrets) acc += c[static_cast<std::size_t>(n - 1)];
    fit.mean_regret.push_back(acc / static_cast<double>(cum_regrets.size()));
    logn.push_back(std::log(static_cast<double>(n)));
  }
  if (std::any_of(fit.mean_regret.begin(), fit.mean_regret.end(), [](double r) { return !(r > 0.0); })) {
    fit.degenerate = true;
    return fit;
  }
  std::vector<double> logr;
  for (const double r : fit.mean_regret) logr.push_back(std::log(r));
  fit.slope = ols_slope(logn, logr);

  std::vector<double> per_trace;
  for (const auto& c : cum_regrets) {
    std::vector<double> ys;
    bool ok = true;
    for (const int n : fit.checkpoints) {
      const double r = c[static_cast<std::size_t>(n - 1)];
      if (!(r > 0.0)) {
        ok = false;
        break;
      }
      ys.push_back(std::log(r));
    }
    if (ok) per_trace.push_back(ols_slope(logn, ys));
  }
  if (per_trace.size() >= 2) {
    const double k = static_cast<double>(per_trace.size());
    const double mean = std::accumulate(per_trace.begin(), per_trace.end(), 0.0) / k;
    double ss = 0.0;
    for (const double v : per_trace) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (k - 1.0));
    const boost::math::students_t dist(k - 1.0);
    fit.ci_halfwidth = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(k);
  }
  return fit;
}

SlopeFit fit_regret_slope(const std::vector<RegretTrace>& traces, std::pair<int, int> window) {
  std::vector<std::vector<double>> cums;
  cums.reserve(traces.size());
  for (const auto& t : traces) cums.push_back(t.cum_regret());
  return fit_regret_slope(cums, window);
}

Verdict judge(const SlopeFit& fit, const TargetExponent& target, bool control, double tolerance,
              double control_floor) {
  if (fit.degenerate || !std::isfinite(fit.slope)) return Verdict::Inconclusive;
  if (!(fit.ci_halfwidth <= tolerance)) return Verdict::Inconclusive;
  if (control) return fit.slope >= control_floor ? Verdict::Pass : Verdict::Fail;
  if (!target.exponent) return Verdict::Inconclusive;
  return fit.slope <= *target.exponent + tolerance ? Verdict::Pass : Verdict::Fail;
}

ExperimentPlan ExperimentPlan::parse(std::string_view toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string("plan: ") + std::string(e.description()));
  }
  check_keys(root,
             {"name", "output", "seeds", "budgets", "B", "alpha_cap", "n_centers", "delta", "tolerance",
              "control_floor", "split_threshold_c", "algorithms", "spectrum", "infogain", "noise", "beta", "kernel"},
             "the plan");
  ExperimentPlan p;
  p.name = get_or<std::string>(root, "name", p.name);
  p.output_dir = get_or<std::string>(root, "output", p.output_dir.string());
  p.seeds = int_array<std::uint64_t>(root, "seeds");
  p.budgets = int_array<int>(root, "budgets");
  p.B = get_or<double>(root, "B", p.B);
  p.alpha_cap = get_or<double>(root, "alpha_cap", p.alpha_cap);
  p.n_centers = get_or<int>(root, "n_centers", p.n_centers);
  p.delta = get_or<double>(root, "delta", p.delta);
  p.tolerance = get_or<double>(root, "tolerance", p.tolerance);
  p.control_floor = get_or<double>(root, "control_floor", p.control_floor);
  p.split_threshold_c = get_or<double>(root, "split_threshold_c", p.split_threshold_c);
  p.spectrum = get_or<bool>(root, "spectrum", p.spectrum);
  p.infogain = get_or<bool>(root, "infogain", p.infogain);
  if (const auto* algs = root.get("algorithms")) {
    const auto* arr = algs->as_array();
    if (!arr) throw ConfigError("plan: 'algorithms' must be an array");
    for (const auto& el : *arr) {
      const auto v = el.value<std::string>();
      if (!v) throw ConfigError("plan: 'algorithms' entries must be strings");
      p.algorithms.push_back(parse_algorithm(*v));
    }
  }
  if (const auto* noise = root.get("noise")) {
    const auto* t = noise->as_table();
    if (!t) throw ConfigError("plan: [noise] must be a table");
    check_keys(*t, {"kind", "scale"}, "[noise]");
    const std::string kind = get_or<std::string>(*t, "kind", "gaussian");
    const double scale = get_or<double>(*t, "scale", p.noise.scale);
    if (kind == "gaussian") {
      p.noise = NoiseModel::gaussian(scale);
    } else if (kind == "uniform") {
      p.noise = NoiseModel::uniform_bounded(scale);
    } else {
      throw ConfigError("plan: unknown noise kind '" + kind + "'");
    }
  }
  if (const auto* beta = root.get("beta")) {
    const auto* t = beta->as_table();
    if (!t) throw ConfigError("plan: [beta] must be a table");
    check_keys(*t, {"schedule", "constant"}, "[beta]");
    const std::string kind = get_or<std::string>(*t, "schedule", "theoretical");
    if (kind == "theoretical") {
      p.beta = BetaSchedule::theoretical();
    } else if (kind == "constant") {
      p.beta = BetaSchedule::fixed(get_or<double>(*t, "constant", 2.0));
    } else {
      throw ConfigError("plan: unknown beta schedule '" + kind + "'");
    }
  }
  if (const auto* kernels = root.get("kernel")) {
    const auto* arr = kernels->as_array();
    if (!arr) throw ConfigError("plan: 'kernel' must be an array of tables");
    for (const auto& el : *arr) {
      const auto* t = el.as_table();
      if (!t) throw ConfigError("plan: 'kernel' entries must be tables");
      p.kernels.push_back(parse_kernel_table(*t));
    }
  }
  p.validate();
  return p;
}

ExperimentPlan ExperimentPlan::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("plan: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentPlan::to_toml() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "name = \"" << name << "\"\n";
  os << "output = \"" << output_dir.string() << "\"\n";
  os << "seeds = [";
  for (std::size_t i = 0; i < seeds.size(); ++i) os << (i ? ", " : "") << seeds[i];
  os << "]\nbudgets = [";
  for (std::size_t i = 0; i < budgets.size(); ++i) os << (i ? ", " : "") << budgets[i];
  os << "]\nalgorithms = [";
  for (std::size_t i = 0; i < algorithms.size(); ++i) os << (i ? ", " : "") << '"' << to_string(algorithms[i]) << '"';
  os << "]\n";
  os << "B = " << exact(B) << "\nalpha_cap = " << exact(alpha_cap) << "\nn_centers = " << n_centers
     << "\ndelta = " << exact(delta) << "\ntolerance = " << exact(tolerance) << "\ncontrol_floor = " << exact(control_floor)
     << "\nsplit_threshold_c = " << exact(split_threshold_c) << "\nspectrum = " << (spectrum ? "true" : "false")
     << "\ninfogain = " << (infogain ? "true" : "false") << "\n\n";
  os << "[noise]\nkind = \"" << (noise.kind == NoiseKind::Gaussian ? "gaussian" : "uniform") << "\"\nscale = "
     << exact(noise.scale) << "\n\n";
  os << "[beta]\nschedule = \"" << (beta.kind == BetaSchedule::Kind::Constant ? "constant" : "theoretical")
     << "\"\nconstant = " << exact(beta.constant) << '\n';
  for (const auto& k : kernels) os << '\n' << kernel_toml(k);
  return os.str();
}

void ExperimentPlan::validate() const {
  for (const auto& k : kernels) k.validate();
  for (const int b : budgets)
    if (b < 1) throw ConfigError("plan: budgets must be >= 1");
  if (!(B > 0.0)) throw ConfigError("plan: B must be > 0");
  if (!(noise.scale >= 0.0)) throw ConfigError("plan: noise scale must be >= 0");
  if (!(alpha_cap > 0.0)) throw ConfigError("plan: alpha_cap must be > 0");
  if (n_centers < 1) throw ConfigError("plan: n_centers must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("plan: delta must be in (0, 1)");
  if (!(tolerance > 0.0)) throw ConfigError("plan: tolerance must be > 0");
  if (!(split_threshold_c > 0.0)) throw ConfigError("plan: split_threshold_c must be > 0");
}

std::vector<ExperimentPlan::Run> ExperimentPlan::enumerate() const {
  std::vector<Run> runs;
  for (std::size_t k = 0; k < kernels.size(); ++k)
    for (const Algorithm a : algorithms)
      for (const int b : budgets)
        for (const std::uint64_t s : seeds) runs.push_back({k, a, s, b});
  return runs;
}

RkhsFunction plan_function(const ExperimentPlan& plan, const KernelSpec& kernel, std::uint64_t seed) {
  return sample_rkhs_function(kernel, plan.B, plan.n_centers, seed, default_certification_grid(kernel.dim));
}

RegretTrace execute_run(const ExperimentPlan& plan, const KernelSpec& kernel, Algorithm algorithm,
                        std::uint64_t seed, int budget, const std::shared_ptr<const InfoGainSchedule>& gamma) {
  BanditOracle oracle(plan_function(plan, kernel, seed), plan.noise, seed);
  const double sigma = plan.noise.subgaussian();
  auto schedule = gamma;
  if (!schedule && plan.beta.kind == BetaSchedule::Kind::TheoreticalRkhs &&
      (algorithm == Algorithm::LpGpUcb || algorithm == Algorithm::GpUcb))
    schedule = std::make_shared<const InfoGainSchedule>(InfoGainSchedule::for_kernel(kernel));
  const Kernel k(kernel);
  SmoothnessParams smoothness = holder_params(kernel, 1.0, plan.alpha_cap);
  smoothness.L = default_smoothness_constant(k, plan.B, smoothness);

  RegretTrace trace;
  switch (algorithm) {
    case Algorithm::LpGpUcb: {
      LpGpUcbConfig cfg = LpGpUcbConfig::from_smoothness(smoothness, budget, plan.B, sigma, plan.delta);
      cfg.beta_schedule = plan.beta;
      cfg.split_threshold_c = plan.split_threshold_c;
      cfg.seed = seed;
      cfg.gamma = schedule;
      trace = run_lp_gp_ucb(oracle, kernel, cfg);
      break;
    }
    case Algorithm::GpUcb:
      trace = run_gp_ucb(oracle, kernel, budget, plan.B, sigma, plan.beta, uniform_grid(grid_for_dim(kernel.dim), kernel.dim),
                         plan.delta, schedule);
      break;
    case Algorithm::LocalPolyUcb: trace = run_local_poly_ucb(oracle, smoothness, budget, sigma, plan.delta, seed); break;
    case Algorithm::Uniform: trace = run_uniform(oracle, budget, seed); break;
  }
  trace.seed = seed;
  return trace;
}

std::vector<double> read_trace_regret(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("trace: cannot open " + path.string());
  std::string line;
  int cum_col = -1, decision_col = -1;
  std::vector<double> out;
  bool schema_ok = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line == "# schema=1") schema_ok = true;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cum_col < 0) {
      if (!schema_ok) throw ConfigError("trace: missing '# schema=1' in " + path.string());
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "cum_regret") cum_col = static_cast<int>(i);
        if (cols[i] == "decision") decision_col = static_cast<int>(i);
      }
      if (cum_col < 0 || decision_col < 0) throw ConfigError("trace: bad header in " + path.string());
      continue;
    }
    if (static_cast<int>(cols.size()) <= cum_col) throw ConfigError("trace: short row in " + path.string());
    if (cols[static_cast<std::size_t>(decision_col)] != "sample") continue;
    out.push_back(std::stod(cols[static_cast<std::size_t>(cum_col)]));
  }
  return out;
}

void write_slopes_csv(const std::vector<SlopeReport>& reports, std::ostream& os) {
  os << std::setprecision(17);
  os << "# schema=1\n";
  os << "algorithm,kernel,budget,fitted_slope,ci_halfwidth,target_exponent,source,verdict\n";
  for (const auto& r : reports) {
    os << to_string(r.algorithm) << ',' << r.kernel.tag() << ',' << r.budget << ',' << r.fit.slope << ','
       << r.fit.ci_halfwidth << ',';
    if (r.target.exponent) {
      os << *r.target.exponent << ',' << to_string(r.target.source);
    } else {
      os << "nan," << (r.control ? "control" : r.target.dne ? "DNE" : "none");
    }
    os << ',' << to_string(r.verdict) << '\n';
  }
}

void write_summary(const ExperimentPlan& plan, const std::vector<SlopeReport>& reports,
                   const std::vector<std::string>& failures, std::ostream& os) {
  os << "plan: " << plan.name << '\n';
  os << "runs: " << plan.enumerate().size() << " (" << failures.size() << " failed)\n";
  os << "tolerance: +" << plan.tolerance << " on upper-bound exponents\n\n";
  os << "regret table cells (row | column | status | detail)\n";
  const std::vector<std::string> rows{"SE", "Matern nu<=1", "Matern nu>1", "RQ", "gamma-exp", "PP-q", "PBL"};
  const std::vector<std::pair<std::string, std::optional<Algorithm>>> columns{
      {"lower bound", std::nullopt},
      {"SupKernelUCB (gp-ucb)", Algorithm::GpUcb},
      {"UCB-Meta (local-poly-ucb)", Algorithm::LocalPolyUcb},
      {"LP-GP-UCB (lp-gp-ucb)", Algorithm::LpGpUcb}};
  for (const auto& row : rows) {
    for (const auto& [label, algorithm] : columns) {
      std::string status;
      std::string detail;
      if (!algorithm) {
        status = (row == "RQ" || row == "PBL") ? "DNE" : "OutOfScope";
        detail = status == "DNE" ? "no lower bound" : "lower bounds are not tested";
      } else {
        const bool dne = row == "PP-q" && *algorithm == Algorithm::GpUcb;
        std::vector<const SlopeReport*> hits;
        for (const auto& r : reports)
          if (r.algorithm == *algorithm && table_row(r.kernel) == row) hits.push_back(&r);
        if (dne) {
          status = "DNE";
          detail = "no bound for the whole space";
        } else if (hits.empty()) {
          status = "OutOfScope";
          detail = "not in this plan";
        } else {
          bool any_fail = false, all_pass = true;
          for (const auto* r : hits) {
            any_fail |= r->verdict == Verdict::Fail;
            all_pass &= r->verdict == Verdict::Pass;
            if (!detail.empty()) detail += "; ";
            detail += r->kernel.tag() + " n=" + std::to_string(r->budget) + " slope=" + fmt(r->fit.slope) + "+-" +
                      fmt(r->fit.ci_halfwidth) + " target=" +
                      (r->target.exponent ? fmt(*r->target.exponent) + " (" + std::string(to_string(r->target.source)) + ")"
                                          : std::string("none")) +
                      " " + std::string(to_string(r->verdict));
          }
          status = any_fail ? "Fail" : all_pass ? "Pass" : "Inconclusive";
        }
      }
      os << row << " | " << label << " | " << status << " | " << detail << '\n';
    }
  }
  bool header = false;
  for (const auto& r : reports) {
    if (!r.control) continue;
    if (!header) {
      os << "\ncontrols (uniform baseline, pass when slope >= " << plan.control_floor << ")\n";
      header = true;
    }
    os << r.kernel.tag() << " n=" << r.budget << " slope=" << fmt(r.fit.slope) << "+-" << fmt(r.fit.ci_halfwidth)
       << ' ' << to_string(r.verdict) << '\n';
  }
  if (!failures.empty()) {
    os << "\nfailed runs\n";
    for (const auto& f : failures) os << f << '\n';
  }
}

namespace {

std::vector<SlopeReport> build_reports(const ExperimentPlan& plan,
                                       const std::map<std::tuple<std::size_t, Algorithm, int>, std::vector<std::vector<double>>>& groups) {
  std::vector<SlopeReport> reports;
  for (std::size_t k = 0; k < plan.kernels.size(); ++k) {
    for (const Algorithm a : plan.algorithms) {
      for (const int b : plan.budgets) {
        const auto it = groups.find({k, a, b});
        SlopeReport r;
        r.algorithm = a;
        r.kernel = plan.kernels[k];
        r.budget = b;
        r.target = target_exponent(r.kernel, a);
        r.control = a == Algorithm::Uniform;
        if (it != groups.end() && it->second.size() >= 3 && b >= 32) {
          r.fit = fit_regret_slope(it->second, {b / 16, b});
        } else {
          r.fit.degenerate = true;
        }
        r.verdict = judge(r.fit, r.target, r.control, plan.tolerance, plan.control_floor);
        reports.push_back(std::move(r));
      }
    }
  }
  return reports;
}

void write_aggregates(const ExperimentPlan& plan, PlanResult& result) {
  {
    std::ofstream os(plan.output_dir / "slopes.csv");
    write_slopes_csv(result.reports, os);
  }
  {
    std::ofstream os(plan.output_dir / "summary.txt");
    write_summary(plan, result.reports, result.failures, os);
  }
  result.exit_code = result.failures.empty() ? 0 : 1;
  for (const auto& r : result.reports)
    if (r.verdict == Verdict::Fail) result.exit_code = 1;
}

void write_spectrum(const ExperimentPlan& plan) {
  std::ofstream os(plan.output_dir / "spectrum.csv");
  os << std::setprecision(17) << "# schema=1\nkernel,omega,value\n";
  std::vector<double> omegas;
  constexpr int kCount = 60;
  for (int i = 0; i < kCount; ++i) omegas.push_back(10.0 * std::pow(100.0, static_cast<double>(i) / (kCount - 1)));
  for (const auto& k : plan.kernels) {
    if (k.dim != 1 && k.dim != 3 && k.family != KernelFamily::Matern && k.family != KernelFamily::SquareExp) continue;
    try {
      const FourierSamples s = radial_fourier(k, omegas, k.dim);
      for (std::size_t i = 0; i < s.omegas.size(); ++i)
        os << k.tag() << ',' << s.omegas[i] << ',' << s.values[i] << '\n';
    } catch (const QuadratureError& e) {
      os << "# " << k.tag() << ": " << e.what() << '\n';
    }
  }
}

void write_infogain(const ExperimentPlan& plan) {
  std::ofstream os(plan.output_dir / "infogain.csv");
  os << std::setprecision(17) << "# schema=1\nkernel,n,gamma_hat,bound_n_exponent,bound_log_exponent\n";
  std::set<std::string> seen;
  for (const auto& k : plan.kernels) {
    if (!seen.insert(k.tag()).second) continue;
    const PointList candidates = uniform_grid(grid_for_dim(k.dim), k.dim);
    const InfoGainCurve curve =
        empirical_info_gain(k, 1.0, candidates, std::min<int>(256, static_cast<int>(candidates.size())));
    const InfoGainExponent e = info_gain_bound_exponent(k);
    for (std::size_t i = 0; i < curve.n_values.size(); ++i)
      os << k.tag() << ',' << curve.n_values[i] << ',' << curve.gamma_hat[i] << ','
         << (e.applicable ? e.n_exponent : std::nan("")) << ',' << (e.applicable ? e.log_exponent : std::nan(""))
         << '\n';
  }
}

}  // namespace

PlanResult run_plan(const ExperimentPlan& plan, int threads, std::ostream* log) {
  plan.validate();
  std::filesystem::create_directories(plan.output_dir);
  const auto runs = plan.enumerate();

  std::map<std::size_t, std::shared_ptr<const InfoGainSchedule>> schedules;
  if (plan.beta.kind == BetaSchedule::Kind::TheoreticalRkhs) {
    const bool needs = std::any_of(plan.algorithms.begin(), plan.algorithms.end(), [](Algorithm a) {
      return a == Algorithm::LpGpUcb || a == Algorithm::GpUcb;
    });
    if (needs)
      for (std::size_t k = 0; k < plan.kernels.size(); ++k)
        schedules[k] = std::make_shared<const InfoGainSchedule>(InfoGainSchedule::for_kernel(plan.kernels[k]));
  }

  std::vector<std::vector<double>> regrets(runs.size());
  std::vector<std::string> errors(runs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      const auto& run = runs[i];
      const KernelSpec& kernel = plan.kernels[run.kernel_index];
      try {
        const auto it = schedules.find(run.kernel_index);
        const RegretTrace trace = execute_run(plan, kernel, run.algorithm, run.seed, run.budget,
                                              it == schedules.end() ? nullptr : it->second);
        const auto path = trace_path(plan, kernel, run.algorithm, run.seed, run.budget);
        std::filesystem::create_directories(path.parent_path());
        std::ofstream os(path);
        trace.write_csv(os);
        regrets[i] = trace.cum_regret();
        if (log) {
          std::lock_guard lock(log_mutex);
          *log << "done " << to_string(run.algorithm) << ' ' << kernel.tag() << " seed=" << run.seed
               << " n=" << run.budget << " R=" << (regrets[i].empty() ? 0.0 : regrets[i].back()) << '\n';
        }
      } catch (const std::exception& e) {
        errors[i] = std::string(to_string(run.algorithm)) + ' ' + kernel.tag() + " seed=" + std::to_string(run.seed) +
                    ": " + e.what();
      }
    }
  };
  const int n_threads = std::max(1, threads);
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  PlanResult result;
  std::map<std::tuple<std::size_t, Algorithm, int>, std::vector<std::vector<double>>> groups;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!errors[i].empty()) {
      result.failures.push_back(errors[i]);
      continue;
    }
    groups[{runs[i].kernel_index, runs[i].algorithm, runs[i].budget}].push_back(std::move(regrets[i]));
  }
  if (plan.spectrum) write_spectrum(plan);
  if (plan.infogain) write_infogain(plan);
  result.reports = build_reports(plan, groups);
  write_aggregates(plan, result);
  return result;
}

PlanResult report_from_traces(const ExperimentPlan& plan) {
  plan.validate();
  PlanResult result;
  std::map<std::tuple<std::size_t, Algorithm, int>, std::vector<std::vector<double>>> groups;
  for (const auto& run : plan.enumerate()) {
    const KernelSpec& kernel = plan.kernels[run.kernel_index];
    const auto path = trace_path(plan, kernel, run.algorithm, run.seed, run.budget);
    try {
      groups[{run.kernel_index, run.algorithm, run.budget}].push_back(read_trace_regret(path));
    } catch (const ConfigError& e) {
      result.failures.push_back(e.what());
    }
  }
  result.reports = build_reports(plan, groups);
  write_aggregates(plan, result);
  return result;
}

}  // namespace isobandit
