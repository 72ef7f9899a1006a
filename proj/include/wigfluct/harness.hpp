#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wigfluct/config.hpp"
#include "wigfluct/fluctuations.hpp"
#include "wigfluct/resolvent.hpp"
#include "wigfluct/spectral.hpp"
#include "wigfluct/statistics.hpp"

namespace wigfluct {

inline constexpr const char* kResultSchema = "wigfluct.run/1";

/// Calls fn(i) for i in [0, count) on `threads` workers. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(long count, int threads, const std::function<void(long)>& fn);

std::uint64_t trial_seed(std::uint64_t master, std::size_t n, long trial);

struct TrialSample {
  bool ok = false;
  std::string error;
  std::uint64_t seed = 0;
  double spectral_radius = 0.0;
  std::vector<SampleStatistic> stats;  // one per function
  std::vector<KernelStats> kernels;    // one per z
};

struct SimulationPlan {
  EnsembleSpec ensemble;
  std::size_t n = 0;
  long trials = 0;
  std::uint64_t master_seed = 0;
  int threads = 1;
  std::vector<BVFunction> functions;
  std::vector<FluctuationPrediction> predictions;
  std::vector<Complex> zs;
  /// Extra per-trial work, run on the worker that owns the trial.
  std::function<void(long, const WignerMatrix&, const spectral::EntrySpectrum&)> hook;
};

/// Samples every trial, reduces nothing; result index = trial index.
std::vector<TrialSample> simulate(const SimulationPlan& plan);

struct CheckResult {
  std::string name;
  std::size_t n = 0;
  std::string function;
  double estimate = 0.0;
  double standard_error = 0.0;
  double predicted = 0.0;
  double tolerance = 0.0;
  std::string rule;
  bool passed = false;

  bool operator==(const CheckResult&) const = default;
};

/// c N^{-1/2} for Lipschitz f, c N^{-1/6} otherwise.
double rate_term(std::size_t n, bool lipschitz, double c);

struct MomentVerdict {
  int k = 0;
  double empirical = 0.0;
  double standard_error = 0.0;
  double predicted = 0.0;
  double rate = 0.0;
  bool passed = false;
};

/// Raw moments k = 1..k_max against the centered Gaussian of `variance`;
/// standard errors by batch means; pass iff |diff| <= 3 SE + rate.
std::vector<MomentVerdict> compare_moments(std::span<const double> samples, double variance, int k_max, double rate,
                                           int batches = 50);

struct FunctionSummary {
  std::size_t n = 0;
  std::string function;
  bool lipschitz = false;
  double pred_mean = 0.0;
  double pred_xi_coeff = 0.0;
  double pred_var_diag = 0.0;
  double pred_esq = 0.0;
  double pred_abs_sq = 0.0;
  stats::Estimate t_mean;
  stats::Estimate t_var;
  stats::Estimate s_abs_sq;
  stats::Estimate s_sq_re;
  stats::Estimate s_sq_im;
  std::vector<stats::Estimate> t_moments;  // k = 1..k_max
  double levy = 0.0;
  double levy_se = 0.0;

  bool operator==(const FunctionSummary&) const = default;
};

struct RunResult {
  std::string schema = kResultSchema;
  std::string name;
  std::string ensemble;
  double sigma2 = 0.0;
  double sigma4 = 0.0;
  std::uint64_t master_seed = 0;
  long trials = 0;
  std::vector<std::size_t> n_values;
  std::vector<FunctionSummary> summaries;
  std::vector<CheckResult> checks;
  long failed_trials = 0;
  bool all_passed = false;

  bool operator==(const RunResult&) const = default;
};

struct TrialRecord {
  std::size_t n = 0;
  long trial = 0;
  std::string function;
  SampleStatistic stat;
};

struct RunOutput {
  RunResult result;
  std::vector<TrialRecord> records;
  double wall_seconds = 0.0;
  int threads = 1;
};

/// Throws std::runtime_error if more than 0.1% of trials fail at some n.
RunOutput run_experiment(const ExperimentConfig& cfg);

std::string result_to_json(const RunResult& r);
RunResult result_from_json(const std::string& text);

struct OutputPaths {
  std::string json;
  std::string csv;
  std::string summary;
  static OutputPaths in_dir(const std::string& dir);
};

void write_csv(const std::vector<TrialRecord>& records, const std::string& path);
std::string summary_text(const RunOutput& out);
/// Writes the result file, the per-trial table and the summary; I/O
/// failures throw std::runtime_error naming the path.
void emit_outputs(const RunOutput& out, const OutputPaths& paths);

struct BatteryOptions {
  EnsembleSpec ensemble;
  std::size_t n = 0;
  long trials = 0;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// pleijel_integrate with m = G11 against the eigendecomposition value of
/// f(H)_11, one check per function over all trials.
std::vector<CheckResult> pleijel_battery(const BatteryOptions& opt, const std::vector<BVFunction>& functions,
                                         std::optional<ContourParams> params = std::nullopt);

/// Residual envelopes at z = i eta for each eta; pass iff at least
/// `pass_fraction` of the trials are inside.
std::vector<CheckResult> local_law_battery(const BatteryOptions& opt, const std::vector<double>& etas,
                                           double pass_fraction = 0.95);

struct CovarianceTargets {
  std::vector<std::pair<Complex, Complex>> pairs;
  std::vector<Complex> wick;  // empty to skip
  double extra_tolerance = 0.0;
};
std::vector<CovarianceTargets> default_covariance_targets();

/// Monte Carlo E X, E Y, N E[X X'], E[Y Y'], E[Y conj Y(conj z')] and the
/// Wick product against their predictions, 3 SE (+ extra_tolerance).
std::vector<CheckResult> covariance_battery(const BatteryOptions& opt, const CovarianceTargets& targets);

/// Every z at which kernels must be sampled for `targets`.
std::vector<Complex> covariance_points(const CovarianceTargets& targets);

/// Same checks from kernel samples already computed at `zs`.
std::vector<CheckResult> covariance_checks(const std::vector<TrialSample>& samples, const std::vector<Complex>& zs,
                                           std::size_t n, double sigma2, double sigma4,
                                           const CovarianceTargets& targets);

std::string format_complex(Complex z);

}  // namespace wigfluct
