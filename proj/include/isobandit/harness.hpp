#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isobandit/algorithms.hpp"
#include "isobandit/envs.hpp"
#include "isobandit/kernels.hpp"

namespace isobandit {

enum class BoundSource { RegretTable, GeneralBound };
std::string_view to_string(BoundSource source);

struct TargetExponent {
  std::optional<double> exponent;  // empty for DNE cells and algorithms without a bound
  BoundSource source = BoundSource::RegretTable;
  bool dne = false;
};

/// Upper-bound regret exponent for a kernel and algorithm. GP-UCB stands in
/// for the kernelized column and local-poly-UCB for the smoothness-based one;
/// the uniform baseline has no target.
TargetExponent target_exponent(const KernelSpec& kernel, Algorithm algorithm);

/// Row label of the regret table a kernel belongs to.
std::string table_row(const KernelSpec& kernel);

struct SlopeFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double ci_halfwidth = std::numeric_limits<double>::infinity();
  std::vector<int> checkpoints;
  std::vector<double> mean_regret;
  bool degenerate = false;  // zero regret at a checkpoint
};

/// Dyadic checkpoints lo, 2 lo, ... <= hi.
std::vector<int> dyadic_checkpoints(int lo, int hi);

/// Least-squares slope of log mean R_n against log n over the dyadic
/// checkpoints in the window, with a 95% t-interval from the per-trace
/// slopes. Throws ConfigError for fewer than 3 traces or a window beyond the
/// shortest trace.
SlopeFit fit_regret_slope(const std::vector<std::vector<double>>& cum_regrets, std::pair<int, int> window);
SlopeFit fit_regret_slope(const std::vector<RegretTrace>& traces, std::pair<int, int> window);

enum class Verdict { Pass, Fail, Inconclusive };
std::string_view to_string(Verdict verdict);

struct SlopeReport {
  Algorithm algorithm = Algorithm::Uniform;
  KernelSpec kernel;
  int budget = 0;
  SlopeFit fit;
  TargetExponent target;
  Verdict verdict = Verdict::Inconclusive;
  bool control = false;  // uniform baseline: passes when the slope stays >= control floor
};

/// Inconclusive when the fit is degenerate or the CI exceeds the tolerance;
/// otherwise Pass iff slope <= target + tolerance (or, for the control,
/// slope >= control_floor). Reports without a target are Inconclusive.
Verdict judge(const SlopeFit& fit, const TargetExponent& target, bool control, double tolerance,
              double control_floor);

struct ExperimentPlan {
  std::string name = "plan";
  std::vector<KernelSpec> kernels;
  std::vector<Algorithm> algorithms;
  std::vector<std::uint64_t> seeds;
  std::vector<int> budgets;
  NoiseModel noise = NoiseModel::gaussian(0.1);
  double B = 2.0;
  std::filesystem::path output_dir = "out";
  double alpha_cap = 2.0;
  int n_centers = 30;
  double delta = 0.05;
  double tolerance = 0.1;
  double control_floor = 0.9;
  BetaSchedule beta;
  double split_threshold_c = 1.0;
  bool spectrum = true;
  bool infogain = true;

  /// Throws ConfigError on unknown keys, bad values or a malformed file.
  static ExperimentPlan parse(std::string_view toml_text);
  static ExperimentPlan load(const std::filesystem::path& path);
  /// TOML rendering that parse() reads back.
  std::string to_toml() const;
  void validate() const;

  struct Run {
    std::size_t kernel_index = 0;
    Algorithm algorithm = Algorithm::Uniform;
    std::uint64_t seed = 0;
    int budget = 0;
  };
  /// Kernel-major, then algorithm, budget and seed, in plan order.
  std::vector<Run> enumerate() const;
};

/// The test function a plan run uses: one per (kernel, seed).
RkhsFunction plan_function(const ExperimentPlan& plan, const KernelSpec& kernel, std::uint64_t seed);

/// Runs one algorithm against a fresh oracle.
RegretTrace execute_run(const ExperimentPlan& plan, const KernelSpec& kernel, Algorithm algorithm,
                        std::uint64_t seed, int budget,
                        const std::shared_ptr<const InfoGainSchedule>& gamma = nullptr);

struct PlanResult {
  std::vector<SlopeReport> reports;
  std::vector<std::string> failures;  // per-run errors
  int exit_code = 0;                  // 0 all pass, 1 any fail
};

/// Executes every run on a pool of `threads` workers and writes traces/,
/// slopes.csv, infogain.csv, spectrum.csv and summary.txt under the output
/// directory.
PlanResult run_plan(const ExperimentPlan& plan, int threads, std::ostream* log = nullptr);

/// Cumulative-regret column of a trace CSV written by RegretTrace::write_csv.
std::vector<double> read_trace_regret(const std::filesystem::path& path);

/// Recomputes slopes.csv and summary.txt from the trace files under
/// plan.output_dir alone.
PlanResult report_from_traces(const ExperimentPlan& plan);

void write_slopes_csv(const std::vector<SlopeReport>& reports, std::ostream& os);
/// Every regret-table cell with its status: Pass, Fail, Inconclusive, DNE or
/// OutOfScope.
void write_summary(const ExperimentPlan& plan, const std::vector<SlopeReport>& reports,
                   const std::vector<std::string>& failures, std::ostream& os);

}  // namespace isobandit
