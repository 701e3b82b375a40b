#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

#include "isobandit/algorithms.hpp"
#include "isobandit/errors.hpp"
#include "isobandit/harness.hpp"
#include "isobandit/spectral.hpp"

namespace {

using namespace isobandit;

struct KernelFlags {
  std::string family = "matern";
  double lengthscale = 1.0;
  double nu = 1.5;
  double a = 1.0;
  double gamma = 1.0;
  int q = 1;
  int m = 1;
  int dim = 1;

  void attach(CLI::App* app) {
    app->add_option("--family", family, "matern, se, rq, gamma-exp, pp, dirichlet")->capture_default_str();
    app->add_option("--lengthscale", lengthscale)->capture_default_str();
    app->add_option("--nu", nu, "Matern smoothness")->capture_default_str();
    app->add_option("--a", a, "rational-quadratic shape")->capture_default_str();
    app->add_option("--gamma", gamma, "gamma-exponential power")->capture_default_str();
    app->add_option("--q", q, "piecewise-polynomial order")->capture_default_str();
    app->add_option("--m", m, "Dirichlet harmonic order")->capture_default_str();
    app->add_option("--dim", dim)->capture_default_str();
  }

  KernelSpec spec() const {
    KernelSpec k;
    k.family = parse_family(family);
    k.lengthscale = lengthscale;
    k.nu = nu;
    k.a = a;
    k.gamma = gamma;
    k.q_pp = q;
    k.m_dir = m;
    k.dim = dim;
    k.validate();
    return k;
  }
};

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      const std::filesystem::path p(path);
      if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
      file_.open(p);
      if (!file_) throw ConfigError("cannot open " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral, information-gain and bandit experiments for isotropic kernels"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::uint64_t seed = 1;
  std::string out;
  int threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  bool print_defaults = false;
  app.add_option("--seed", seed, "base seed")->capture_default_str();
  app.add_option("--out", out, "output file (spectrum, eigs, infogain, bandit) or directory (plans)");
  app.add_option("--threads", threads, "worker threads for plans")->capture_default_str();
  app.add_flag("--print-defaults", print_defaults, "print the default plan as TOML and exit");

  KernelFlags kf_spec, kf_eigs, kf_ig, kf_bandit;

  auto* spectrum = app.add_subcommand("spectrum", "radial Fourier transform samples and decay fit");
  kf_spec.attach(spectrum);
  double omega_min = 10.0, omega_max = 1000.0;
  int omega_count = 60;
  bool force_quadrature = false;
  spectrum->add_option("--omega-min", omega_min)->capture_default_str();
  spectrum->add_option("--omega-max", omega_max)->capture_default_str();
  spectrum->add_option("--count", omega_count, "log-spaced samples")->capture_default_str();
  spectrum->add_flag("--quadrature", force_quadrature, "skip closed forms");

  auto* eigs = app.add_subcommand("eigs", "Nystrom eigenvalues and decay slope");
  kf_eigs.attach(eigs);
  int grid = 512;
  std::size_t m_lo = 5, m_hi = 50;
  eigs->add_option("--grid", grid, "points per axis")->capture_default_str();
  eigs->add_option("--m-lo", m_lo)->capture_default_str();
  eigs->add_option("--m-hi", m_hi)->capture_default_str();

  auto* infogain = app.add_subcommand("infogain", "greedy information-gain curve");
  kf_ig.attach(infogain);
  int candidates = 512, n_max = 256;
  double sigma2 = 1.0;
  infogain->add_option("--candidates", candidates, "grid points per axis")->capture_default_str();
  infogain->add_option("--n-max", n_max)->capture_default_str();
  infogain->add_option("--sigma2", sigma2)->capture_default_str();

  auto* bandit = app.add_subcommand("bandit", "one bandit run, or a whole plan with --config");
  kf_bandit.attach(bandit);
  std::string config, algorithm = "lp-gp-ucb";
  int budget = 1000;
  double B = 2.0, sigma = 0.1;
  bandit->add_option("--config", config, "TOML experiment plan");
  bandit->add_option("--algorithm", algorithm, "lp-gp-ucb, gp-ucb, local-poly-ucb, uniform")->capture_default_str();
  bandit->add_option("--n", budget, "budget")->capture_default_str();
  bandit->add_option("--B", B, "RKHS norm of the test function")->capture_default_str();
  bandit->add_option("--sigma", sigma, "Gaussian noise level")->capture_default_str();

  auto* report = app.add_subcommand("report", "recompute slopes.csv and summary.txt from trace files");
  std::string report_config;
  report->add_option("--config", report_config, "the plan that produced the traces")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (print_defaults) {
      ExperimentPlan p;
      p.name = "defaults";
      p.seeds = {1, 2, 3};
      p.budgets = {1000};
      p.algorithms = {Algorithm::LpGpUcb, Algorithm::GpUcb, Algorithm::LocalPolyUcb, Algorithm::Uniform};
      p.kernels = {KernelSpec::matern(0.5, 0.2)};
      std::cout << p.to_toml();
      return 0;
    }

    if (*spectrum) {
      const KernelSpec k = kf_spec.spec();
      std::vector<double> omegas;
      for (int i = 0; i < omega_count; ++i)
        omegas.push_back(omega_min * std::pow(omega_max / omega_min, static_cast<double>(i) / std::max(1, omega_count - 1)));
      FourierOptions opt;
      opt.force_quadrature = force_quadrature;
      const FourierSamples s = radial_fourier(k, omegas, k.dim, opt);
      Output o(out);
      auto& os = o.stream();
      os << std::setprecision(17) << "# schema=1\n";
      try {
        const DecayFit fit = fit_decay_slope(s, omega_min, omega_max);
        os << "# verdict=" << to_string(fit.verdict) << " tau_hat=" << fit.tau_hat << " r2_loglog=" << fit.r2_loglog
           << " r2_semilog=" << fit.r2_semilog << '\n';
      } catch (const std::invalid_argument& e) {
        os << "# fit unavailable: " << e.what() << '\n';
      }
      os << "omega,value,residual\n";
      for (std::size_t i = 0; i < s.omegas.size(); ++i) os << s.omegas[i] << ',' << s.values[i] << ',' << s.residuals[i] << '\n';
      return 0;
    }

    if (*eigs) {
      const KernelSpec k = kf_eigs.spec();
      const EigenEstimate est = nystrom_eigs(k, grid, k.dim);
      Output o(out);
      auto& os = o.stream();
      os << std::setprecision(17) << "# schema=1\n# slope=" << eigen_decay_slope(est, m_lo, m_hi) << " window=[" << m_lo
         << ',' << m_hi << "]\nm,eigenvalue\n";
      for (std::size_t i = 0; i < est.eigenvalues.size(); ++i) os << i + 1 << ',' << est.eigenvalues[i] << '\n';
      return 0;
    }

    if (*infogain) {
      const KernelSpec k = kf_ig.spec();
      const PointList grid_points = uniform_grid(candidates, k.dim);
      const InfoGainCurve curve = empirical_info_gain(k, sigma2, grid_points, n_max);
      const InfoGainExponent e = info_gain_bound_exponent(k);
      Output o(out);
      auto& os = o.stream();
      os << std::setprecision(17) << "# schema=1\n";
      if (e.applicable) {
        os << "# bound: n^" << e.n_exponent << " log^" << e.log_exponent << " n"
           << (e.improved_regime ? " (improved regime)" : "") << '\n';
      } else {
        os << "# bound: not available for these parameters\n";
      }
      os << "n,gamma_hat\n";
      for (std::size_t i = 0; i < curve.n_values.size(); ++i) os << curve.n_values[i] << ',' << curve.gamma_hat[i] << '\n';
      return 0;
    }

    if (*bandit) {
      if (!config.empty()) {
        ExperimentPlan plan = ExperimentPlan::load(config);
        if (!out.empty()) plan.output_dir = out;
        const PlanResult r = run_plan(plan, threads, &std::cerr);
        std::ifstream summary(plan.output_dir / "summary.txt");
        std::cout << summary.rdbuf();
        return r.exit_code;
      }
      ExperimentPlan plan;
      plan.B = B;
      plan.noise = NoiseModel::gaussian(sigma);
      const KernelSpec k = kf_bandit.spec();
      const RegretTrace trace = execute_run(plan, k, parse_algorithm(algorithm), seed, budget);
      Output o(out);
      trace.write_csv(o.stream());
      std::cerr << "cumulative regret " << (trace.rows.empty() ? 0.0 : trace.rows.back().cum_regret) << " after "
                << trace.query_count() << " queries\n";
      return 0;
    }

    if (*report) {
      ExperimentPlan plan = ExperimentPlan::load(report_config);
      if (!out.empty()) plan.output_dir = out;
      const PlanResult r = report_from_traces(plan);
      std::ifstream summary(plan.output_dir / "summary.txt");
      std::cout << summary.rdbuf();
      return r.exit_code;
    }

    std::cout << app.help();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
