// Command line front end: predict, run, pleijel-check, local-law, covariance.
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wigfluct/config.hpp"
#include "wigfluct/harness.hpp"

namespace {

using namespace wigfluct;
using nlohmann::json;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

void add_common(CLI::App* app, Common& c, bool config_required) {
  auto* opt = app->add_option("--config", c.config, "experiment config (YAML)");
  if (config_required) opt->required();
  app->add_option("--seed", c.seed, "master seed, overrides the config");
  app->add_option("--threads", c.threads, "worker threads, overrides the config")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "output directory, overrides the config");
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (c.seed) cfg.master_seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  if (c.out) cfg.output_dir = *c.out;
  cfg.validate();
  return cfg;
}

BatteryOptions battery(const ExperimentConfig& cfg, std::size_t n) {
  BatteryOptions o;
  o.ensemble = cfg.ensemble;
  o.n = n;
  o.trials = cfg.trials;
  o.seed = cfg.master_seed;
  o.threads = cfg.threads;
  return o;
}

json check_json(const CheckResult& c) {
  return {{"name", c.name},       {"n", c.n},           {"function", c.function},   {"estimate", c.estimate},
          {"se", c.standard_error}, {"predicted", c.predicted}, {"tolerance", c.tolerance}, {"rule", c.rule},
          {"passed", c.passed}};
}

// Prints one line per check and writes checks.json when an output dir is set.
int report(const std::vector<CheckResult>& checks, const std::string& kind, const std::optional<std::string>& out) {
  bool all = true;
  json arr = json::array();
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " n=" << c.n;
    if (!c.function.empty()) std::cout << " f=" << c.function;
    std::cout << " estimate=" << c.estimate << " predicted=" << c.predicted << " tol=" << c.tolerance << " ["
              << c.rule << "]\n";
    all = all && c.passed;
    arr.push_back(check_json(c));
  }
  if (out) {
    std::filesystem::create_directories(*out);
    const auto path = std::filesystem::path(*out) / (kind + ".json");
    std::ofstream f(path);
    if (!f) throw std::runtime_error(path.string() + ": cannot open for writing");
    f << json{{"schema", kResultSchema}, {"kind", kind}, {"all_passed", all}, {"checks", arr}}.dump(2) << '\n';
  }
  std::cout << (all ? "all checks passed\n" : "some checks failed\n");
  return all ? 0 : 1;
}

int cmd_predict(const Common& c, const std::string& kind, const std::vector<std::string>& params, double s2,
                std::optional<double> s4) {
  std::vector<BVFunction> functions;
  double sigma2 = s2, sigma4 = s4.value_or(3.0);
  if (!c.config.empty()) {
    const ExperimentConfig cfg = load_config(c.config);
    sigma2 = cfg.ensemble.sigma2;
    sigma4 = cfg.ensemble.sigma4;
    for (const auto& f : cfg.functions) functions.push_back(f.build());
  }
  if (!kind.empty()) {
    std::map<std::string, double> p;
    for (const auto& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--param", "expected key=value, got '" + kv + "'");
      p[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
    functions.push_back(bv::make(kind, p));
  }
  if (functions.empty()) throw CLI::ValidationError("predict", "give --function or --config");
  json arr = json::array();
  for (const auto& f : functions) {
    const FluctuationPrediction p = predict(f, sigma2, sigma4);
    arr.push_back({{"function", f.name()},
                   {"sigma2", sigma2},
                   {"sigma4", sigma4},
                   {"lipschitz", p.lipschitz},
                   {"mean", p.mean},
                   {"xi_coeff", p.xi_coeff},
                   {"var_diag", p.var_diag},
                   {"offdiag_sq", p.var_offdiag_sq},
                   {"offdiag_abs_sq", p.abs_sq},
                   {"v1", p.v.v1},
                   {"v1_sigma2", p.v.v1_sigma2},
                   {"v2", p.v.v2},
                   {"v3", p.v.v3},
                   {"v4", p.v.v4}});
  }
  std::cout << arr.dump(2) << '\n';
  return 0;
}

int cmd_run(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const RunOutput out = run_experiment(cfg);
  emit_outputs(out, OutputPaths::in_dir(cfg.output_dir));
  std::cout << summary_text(out);
  std::cout << "results written to " << cfg.output_dir << '\n';
  return out.result.all_passed ? 0 : 1;
}

int cmd_pleijel(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  std::vector<BVFunction> functions;
  for (const auto& f : cfg.functions) functions.push_back(f.build());
  if (functions.empty()) functions = builtin_library();
  std::vector<CheckResult> all;
  for (std::size_t n : cfg.n_values) {
    const double N = static_cast<double>(n);
    ContourParams p;
    p.eta0 = std::pow(N, -2.0 / 3.0);
    p.M = N;
    p = cfg.contour.apply(p);
    for (auto& r : pleijel_battery(battery(cfg, n), functions, p)) all.push_back(r);
  }
  return report(all, "pleijel-check", c.out ? c.out : std::optional<std::string>(cfg.output_dir));
}

int cmd_local_law(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  std::vector<CheckResult> all;
  for (std::size_t n : cfg.n_values) {
    const std::vector<double> etas{1.0, 1.0 / std::sqrt(static_cast<double>(n))};
    for (auto& r : local_law_battery(battery(cfg, n), etas)) all.push_back(r);
  }
  return report(all, "local-law", cfg.output_dir);
}

int cmd_covariance(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  std::vector<CheckResult> all;
  for (std::size_t n : cfg.n_values)
    for (const auto& t : default_covariance_targets())
      for (auto& r : covariance_battery(battery(cfg, n), t)) all.push_back(r);
  return report(all, "covariance", cfg.output_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fluctuations of matrix entries of functions of Wigner matrices"};
  app.require_subcommand(1);

  Common predict_opts, run_opts, pleijel_opts, local_opts, cov_opts;
  std::string kind;
  std::vector<std::string> params;
  double sigma2 = 1.0;
  std::optional<double> sigma4;

  auto* predict_cmd = app.add_subcommand("predict", "print the limiting law for a test function");
  add_common(predict_cmd, predict_opts, false);
  predict_cmd->add_option("--function", kind, "builtin kind: indicator, abs, monomial, bump, ramp, zero");
  predict_cmd->add_option("--param", params, "function parameter key=value (repeatable)");
  predict_cmd->add_option("--sigma2", sigma2, "N E h_ij^2")->check(CLI::Range(-1.0, 1.0));
  predict_cmd->add_option("--sigma4", sigma4, "N^2 E |h_ij|^4");

  auto* run_cmd = app.add_subcommand("run", "full Monte Carlo experiment");
  add_common(run_cmd, run_opts, true);
  auto* pleijel_cmd = app.add_subcommand("pleijel-check", "contour inversion against eigendecomposition");
  add_common(pleijel_cmd, pleijel_opts, true);
  auto* local_cmd = app.add_subcommand("local-law", "resolvent residual envelopes");
  add_common(local_cmd, local_opts, true);
  auto* cov_cmd = app.add_subcommand("covariance", "X and Y kernel covariances");
  add_common(cov_cmd, cov_opts, true);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*predict_cmd) return cmd_predict(predict_opts, kind, params, sigma2, sigma4);
    if (*run_cmd) return cmd_run(run_opts);
    if (*pleijel_cmd) return cmd_pleijel(pleijel_opts);
    if (*local_cmd) return cmd_local_law(local_opts);
    if (*cov_cmd) return cmd_covariance(cov_opts);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
