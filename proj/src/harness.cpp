#include "wigfluct/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "wigfluct/pleijel.hpp"
#include "wigfluct/semicircle.hpp"

namespace wigfluct {
namespace {

using nlohmann::json;

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

CheckResult band_check(std::string name, std::size_t n, std::string function, const stats::Estimate& est,
                       double predicted, double extra, const std::string& extra_rule) {
  CheckResult c;
  c.name = std::move(name);
  c.n = n;
  c.function = std::move(function);
  c.estimate = est.value;
  c.standard_error = est.se;
  c.predicted = predicted;
  c.tolerance = 3.0 * est.se + extra;
  c.rule = extra > 0.0 ? "3 SE + " + extra_rule : "3 SE";
  c.passed = std::abs(est.value - predicted) <= c.tolerance;
  return c;
}

stats::Estimate mean_of(const std::vector<double>& xs) { return stats::mean_estimate(xs); }

std::size_t index_of(const std::vector<Complex>& zs, Complex z) {
  const auto it = std::find(zs.begin(), zs.end(), z);
  if (it == zs.end()) throw std::invalid_argument("covariance: z " + format_complex(z) + " was not sampled");
  return static_cast<std::size_t>(it - zs.begin());
}

void push_complex_checks(std::vector<CheckResult>& out, const std::string& name, std::size_t n,
                         const std::vector<Complex>& values, Complex predicted, double extra) {
  std::vector<double> re, im;
  re.reserve(values.size());
  im.reserve(values.size());
  for (const Complex& v : values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  out.push_back(band_check(name + ".re", n, "", mean_of(re), predicted.real(), extra, num(extra)));
  out.push_back(band_check(name + ".im", n, "", mean_of(im), predicted.imag(), extra, num(extra)));
}

json estimate_json(const stats::Estimate& e) { return json{{"value", e.value}, {"se", e.se}}; }
stats::Estimate estimate_from(const json& j) { return {j.at("value").get<double>(), j.at("se").get<double>()}; }

}  // namespace

std::string format_complex(Complex z) {
  std::ostringstream os;
  os << std::setprecision(6) << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

void parallel_for(long count, int threads, const std::function<void(long)>& fn) {
  const int workers = static_cast<int>(std::max<long>(1, std::min<long>(threads, count)));
  if (workers <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (long i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t n, long trial) {
  return stream_seed(master, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial)});
}

std::vector<TrialSample> simulate(const SimulationPlan& plan) {
  if (plan.functions.size() != plan.predictions.size())
    throw std::invalid_argument("simulate: one prediction per function required");
  spectral::use_single_threaded_blas();
  std::vector<TrialSample> out(static_cast<std::size_t>(plan.trials));
  parallel_for(plan.trials, plan.threads, [&](long t) {
    TrialSample& s = out[static_cast<std::size_t>(t)];
    s.seed = trial_seed(plan.master_seed, plan.n, t);
    try {
      const WignerMatrix h = sample_wigner(plan.ensemble, plan.n, s.seed);
      const spectral::EntrySpectrum spec = spectral::entry_spectrum(h);
      s.spectral_radius = std::max(std::abs(spec.eigenvalues.front()), std::abs(spec.eigenvalues.back()));
      for (std::size_t i = 0; i < plan.functions.size(); ++i) {
        SampleStatistic st =
            t_statistic(entry_values(spec, plan.functions[i]), plan.n, h.xi11(), h.xi12(), plan.predictions[i]);
        st.seed = s.seed;
        s.stats.push_back(st);
      }
      for (Complex z : plan.zs) s.kernels.push_back(kernel_stats(spec, z));
      if (plan.hook) plan.hook(t, h, spec);
      s.ok = true;
    } catch (const std::exception& e) {
      s.ok = false;
      s.error = e.what();
      s.stats.clear();
      s.kernels.clear();
    }
  });
  return out;
}

double rate_term(std::size_t n, bool lipschitz, double c) {
  const double N = static_cast<double>(n);
  return c * (lipschitz ? std::pow(N, -0.5) : std::pow(N, -1.0 / 6.0));
}

std::vector<MomentVerdict> compare_moments(std::span<const double> samples, double variance, int k_max, double rate,
                                           int batches) {
  if (k_max < 1 || k_max > 6) throw std::invalid_argument("compare_moments: k_max must lie in [1, 6]");
  std::vector<MomentVerdict> out;
  for (int k = 1; k <= k_max; ++k) {
    auto stat = [k](std::span<const double> xs) {
      double s = 0.0;
      for (double x : xs) s += std::pow(x, k);
      return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
    };
    const stats::Estimate e = stats::batch_means(samples, stat, batches);
    MomentVerdict v;
    v.k = k;
    v.empirical = e.value;
    v.standard_error = e.se;
    v.predicted = gaussian_moment(k, variance);
    v.rate = rate;
    v.passed = std::abs(v.empirical - v.predicted) <= 3.0 * v.standard_error + rate;
    out.push_back(v);
  }
  return out;
}

std::vector<CovarianceTargets> default_covariance_targets() {
  CovarianceTargets t;
  t.pairs = {{Complex(0.0, 1.0), Complex(0.0, 1.0)}, {Complex(0.5, 0.5), Complex(-0.5, 0.5)}};
  t.wick = {Complex(0.0, 1.0), Complex(0.5, 0.5), Complex(-0.5, 0.5), Complex(0.0, 1.0)};
  return {t};
}

std::vector<Complex> covariance_points(const CovarianceTargets& targets) {
  std::vector<Complex> zs;
  auto add = [&](Complex z) {
    if (std::find(zs.begin(), zs.end(), z) == zs.end()) zs.push_back(z);
  };
  for (const auto& [z, zp] : targets.pairs) {
    add(z);
    add(zp);
    add(std::conj(zp));
  }
  for (Complex z : targets.wick) add(z);
  return zs;
}

std::vector<CheckResult> covariance_checks(const std::vector<TrialSample>& samples, const std::vector<Complex>& zs,
                                           std::size_t n, double sigma2, double sigma4,
                                           const CovarianceTargets& targets) {
  const double N = static_cast<double>(n);
  const double extra = targets.extra_tolerance;
  std::vector<const TrialSample*> ok;
  for (const auto& s : samples)
    if (s.ok) ok.push_back(&s);
  auto collect = [&](auto&& fn) {
    std::vector<Complex> v;
    v.reserve(ok.size());
    for (const TrialSample* s : ok) v.push_back(fn(*s));
    return v;
  };
  std::vector<CheckResult> out;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const std::string at = "(z=" + format_complex(zs[i]) + ")";
    push_complex_checks(out, "mean_X" + at, n, collect([&](const TrialSample& s) { return s.kernels[i].x_value; }),
                        0.0, extra);
    push_complex_checks(out, "mean_Y" + at, n, collect([&](const TrialSample& s) { return s.kernels[i].y_value; }),
                        0.0, extra);
  }
  for (const auto& [z, zp] : targets.pairs) {
    const std::size_t a = index_of(zs, z), b = index_of(zs, zp), bc = index_of(zs, std::conj(zp));
    const std::string at = "(z=" + format_complex(z) + ",z'=" + format_complex(zp) + ")";
    push_complex_checks(out, "exx" + at, n, collect([&](const TrialSample& s) {
                          return N * s.kernels[a].x_value * s.kernels[b].x_value;
                        }),
                        exx_prediction(z, zp, sigma2, sigma4), extra);
    const EyyPrediction ey = eyy_predictions(z, zp, sigma2);
    push_complex_checks(out, "eyy" + at, n, collect([&](const TrialSample& s) {
                          return s.kernels[a].y_value * s.kernels[b].y_value;
                        }),
                        ey.eyy, extra);
    push_complex_checks(out, "eyybar" + at, n, collect([&](const TrialSample& s) {
                          return s.kernels[a].y_value * std::conj(s.kernels[bc].y_value);
                        }),
                        ey.eyybar, extra);
  }
  if (!targets.wick.empty()) {
    std::vector<std::size_t> idx;
    for (Complex z : targets.wick) idx.push_back(index_of(zs, z));
    std::string at = "(";
    for (std::size_t k = 0; k < targets.wick.size(); ++k) at += (k ? "," : "") + format_complex(targets.wick[k]);
    at += ")";
    const double scale = std::pow(N, static_cast<double>(targets.wick.size()) / 2.0);
    push_complex_checks(out, "wick" + at, n, collect([&](const TrialSample& s) {
                          Complex p = scale;
                          for (std::size_t k : idx) p *= s.kernels[k].x_value;
                          return p;
                        }),
                        wick_prediction(targets.wick, sigma2, sigma4), extra);
  }
  return out;
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  RunOutput out;
  out.threads = cfg.threads;
  RunResult& r = out.result;
  r.name = cfg.name;
  r.ensemble = cfg.ensemble.name;
  r.sigma2 = cfg.ensemble.sigma2;
  r.sigma4 = cfg.ensemble.sigma4;
  r.master_seed = cfg.master_seed;
  r.trials = cfg.trials;
  r.n_values = cfg.n_values;

  std::vector<BVFunction> functions;
  std::vector<FluctuationPrediction> predictions;
  for (const auto& fs : cfg.functions) {
    functions.push_back(fs.build());
    predictions.push_back(predict(functions.back(), cfg.ensemble.sigma2, cfg.ensemble.sigma4));
  }
  CovarianceTargets cov = default_covariance_targets().front();
  const CheckSelection& ck = cfg.checks;

  for (std::size_t n : cfg.n_values) {
    const double N = static_cast<double>(n);
    SimulationPlan plan;
    plan.ensemble = cfg.ensemble;
    plan.n = n;
    plan.trials = cfg.trials;
    plan.master_seed = cfg.master_seed;
    plan.threads = cfg.threads;
    plan.functions = functions;
    plan.predictions = predictions;
    if (ck.exx) plan.zs = covariance_points(cov);

    // Pleijel cross-check: |value - f11| / budget per checked trial and function.
    const long pleijel_count = ck.pleijel_oracle ? (cfg.trials + ck.pleijel_every - 1) / ck.pleijel_every : 0;
    std::vector<std::vector<double>> pleijel_ratio(static_cast<std::size_t>(pleijel_count),
                                                   std::vector<double>(functions.size(), 0.0));
    const std::vector<double> etas{1.0, 1.0 / std::sqrt(N)};
    const long ll_count = ck.local_law ? std::min<long>(cfg.trials, ck.local_law_trials) : 0;
    std::vector<std::vector<LocalLawResiduals>> local(static_cast<std::size_t>(ll_count));
    plan.hook = [&](long t, const WignerMatrix& h, const spectral::EntrySpectrum& spec) {
      if (ck.pleijel_oracle && t % ck.pleijel_every == 0) {
        auto shared = std::make_shared<const spectral::EntrySpectrum>(spec);
        const StieltjesSource src = g11_source(shared);
        for (std::size_t i = 0; i < functions.size(); ++i) {
          const ContourParams params = cfg.contour.apply(ContourParams::for_dimension(n, functions[i].lipschitz()));
          const PleijelResult pr = pleijel_integrate(src, functions[i], params);
          const double exact = entry_values(spec, functions[i]).f11;
          pleijel_ratio[static_cast<std::size_t>(t / ck.pleijel_every)][i] =
              std::abs(pr.value - exact) / pr.error_budget;
        }
      }
      if (t < ll_count) {
        std::vector<Complex> zs;
        for (double eta : etas) zs.emplace_back(0.0, eta);
        local[static_cast<std::size_t>(t)] = local_law_residuals(h, zs);
      }
    };
    const std::vector<TrialSample> samples = simulate(plan);

    long failed = 0, outside = 0, ok_count = 0;
    for (const auto& s : samples) {
      if (!s.ok) {
        ++failed;
        continue;
      }
      ++ok_count;
      if (s.spectral_radius > 3.0) ++outside;
    }
    r.failed_trials += failed;
    if (static_cast<double>(failed) > 0.001 * static_cast<double>(cfg.trials))
      throw std::runtime_error("run aborted: " + std::to_string(failed) + " of " + std::to_string(cfg.trials) +
                               " trials failed at n = " + std::to_string(n));
    {
      CheckResult c;
      c.name = "spectral_radius_le_3";
      c.n = n;
      c.estimate = ok_count ? static_cast<double>(outside) / static_cast<double>(ok_count) : 0.0;
      c.tolerance = n >= 500 ? 0.001 : 1.0;
      c.rule = n >= 500 ? "violation fraction <= 0.1%" : "diagnostic only below n = 500";
      c.passed = c.estimate <= c.tolerance;
      r.checks.push_back(c);
    }

    for (std::size_t i = 0; i < functions.size(); ++i) {
      const BVFunction& f = functions[i];
      const FluctuationPrediction& p = predictions[i];
      std::vector<double> t_vals, s_abs, s_re, s_im, s_sq_re, s_sq_im;
      for (std::size_t tr = 0; tr < samples.size(); ++tr) {
        const auto& s = samples[tr];
        if (!s.ok) continue;
        const SampleStatistic& st = s.stats[i];
        out.records.push_back({n, static_cast<long>(tr), f.name(), st});
        t_vals.push_back(st.t_value);
        s_abs.push_back(std::norm(st.s_value));
        s_re.push_back(st.s_value.real());
        s_im.push_back(st.s_value.imag());
        const Complex sq = st.s_value * st.s_value;
        s_sq_re.push_back(sq.real());
        s_sq_im.push_back(sq.imag());
      }
      FunctionSummary fsum;
      fsum.n = n;
      fsum.function = f.name();
      fsum.lipschitz = p.lipschitz;
      fsum.pred_mean = p.mean;
      fsum.pred_xi_coeff = p.xi_coeff;
      fsum.pred_var_diag = p.var_diag;
      fsum.pred_esq = p.var_offdiag_sq;
      fsum.pred_abs_sq = p.abs_sq;
      fsum.t_mean = stats::mean_estimate(t_vals);
      fsum.t_var = stats::variance_estimate(t_vals);
      fsum.s_abs_sq = stats::mean_estimate(s_abs);
      fsum.s_sq_re = stats::mean_estimate(s_sq_re);
      fsum.s_sq_im = stats::mean_estimate(s_sq_im);
      const double rate = rate_term(n, p.lipschitz, ck.rate_c);
      const std::string rate_rule = num(ck.rate_c) + (p.lipschitz ? " N^-1/2" : " N^-1/6");
      if (ck.mean) {
        r.checks.push_back(band_check("mean_T", n, f.name(), fsum.t_mean, 0.0, rate, rate_rule));
        const stats::Estimate sr = stats::mean_estimate(s_re), si = stats::mean_estimate(s_im);
        const stats::Estimate s_mean{std::hypot(sr.value, si.value), std::hypot(sr.se, si.se)};
        r.checks.push_back(band_check("mean_abs_S", n, f.name(), s_mean, 0.0, rate, rate_rule));
      }
      if (ck.variance) {
        r.checks.push_back(band_check("variance_T", n, f.name(), fsum.t_var, p.var_diag, rate, rate_rule));
        r.checks.push_back(band_check("abs_sq_S", n, f.name(), fsum.s_abs_sq, p.abs_sq, rate, rate_rule));
        r.checks.push_back(band_check("sq_S.re", n, f.name(), fsum.s_sq_re, p.var_offdiag_sq, rate, rate_rule));
        r.checks.push_back(band_check("sq_S.im", n, f.name(), fsum.s_sq_im, 0.0, rate, rate_rule));
      }
      if (ck.moments) {
        for (const auto& v : compare_moments(t_vals, p.var_diag, ck.k_max, rate, ck.batches)) {
          fsum.t_moments.push_back({v.empirical, v.standard_error});
          CheckResult c;
          c.name = "moment_T_" + std::to_string(v.k);
          c.n = n;
          c.function = f.name();
          c.estimate = v.empirical;
          c.standard_error = v.standard_error;
          c.predicted = v.predicted;
          c.tolerance = 3.0 * v.standard_error + v.rate;
          c.rule = "3 SE (batch means) + " + rate_rule;
          c.passed = v.passed;
          r.checks.push_back(c);
        }
      }
      if (ck.levy && !t_vals.empty()) {
        fsum.levy = levy_distance(t_vals, p.var_diag);
        const auto reps = stats::bootstrap(
            t_vals, [&](std::span<const double> xs) { return levy_distance(xs, p.var_diag); }, 100,
            stream_seed(cfg.master_seed, {n, i, 0x1e4Bull}));
        fsum.levy_se = stats::sample_sd(reps);
        CheckResult c;
        c.name = "levy_T";
        c.n = n;
        c.function = f.name();
        c.estimate = fsum.levy;
        c.standard_error = fsum.levy_se;
        c.predicted = 0.0;
        c.tolerance = ck.levy_max;
        c.rule = "distance <= levy_max";
        c.passed = fsum.levy <= ck.levy_max;
        r.checks.push_back(c);
      }
      if (ck.pleijel_oracle) {
        double worst = 0.0;
        for (std::size_t k = 0; k < pleijel_ratio.size(); ++k)
          if (samples[k * static_cast<std::size_t>(ck.pleijel_every)].ok) worst = std::max(worst, pleijel_ratio[k][i]);
        CheckResult c;
        c.name = "pleijel_oracle";
        c.n = n;
        c.function = f.name();
        c.estimate = worst;
        c.tolerance = 1.0;
        c.rule = "max |pleijel - f11| / error_budget over checked trials <= 1";
        c.passed = worst <= 1.0;
        r.checks.push_back(c);
      }
      r.summaries.push_back(fsum);
    }

    if (ck.exx) {
      const std::vector<Complex> zs = covariance_points(cov);
      CovarianceTargets with_rate = cov;
      with_rate.extra_tolerance = ck.rate_c / std::sqrt(N);
      for (auto& c : covariance_checks(samples, zs, n, cfg.ensemble.sigma2, cfg.ensemble.sigma4, with_rate)) {
        c.rule = "3 SE + " + num(ck.rate_c) + " N^-1/2";
        r.checks.push_back(c);
      }
    }
    if (ck.local_law) {
      for (std::size_t e = 0; e < etas.size(); ++e) {
        const double eta = etas[e];
        long avg_in = 0, entry_in = 0, used = 0;
        for (long t = 0; t < ll_count; ++t) {
          if (!samples[static_cast<std::size_t>(t)].ok) continue;
          ++used;
          const auto& lr = local[static_cast<std::size_t>(t)][e];
          if (lr.avg_residual <= std::pow(N, 0.1) / (N * eta)) ++avg_in;
          if (lr.max_entry_residual <= std::pow(N, 0.1) / std::sqrt(N * eta)) ++entry_in;
        }
        for (int which = 0; which < 2; ++which) {
          CheckResult c;
          c.name = std::string(which == 0 ? "local_law_avg" : "local_law_entry") + "(eta=" + num(eta) + ")";
          c.n = n;
          c.estimate = used ? static_cast<double>(which == 0 ? avg_in : entry_in) / static_cast<double>(used) : 0.0;
          c.predicted = 1.0;
          c.tolerance = 0.05;
          c.rule = which == 0 ? "fraction with |m_N - m| <= N^0.1/(N eta) >= 0.95"
                              : "fraction with max|G_ij - delta_ij m| <= N^0.1/sqrt(N eta) >= 0.95";
          c.passed = c.estimate >= 0.95;
          r.checks.push_back(c);
        }
      }
    }
  }
  r.all_passed = std::all_of(r.checks.begin(), r.checks.end(), [](const CheckResult& c) { return c.passed; });
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string result_to_json(const RunResult& r) {
  json j;
  j["schema"] = r.schema;
  j["name"] = r.name;
  j["ensemble"] = r.ensemble;
  j["sigma2"] = r.sigma2;
  j["sigma4"] = r.sigma4;
  j["master_seed"] = r.master_seed;
  j["trials"] = r.trials;
  j["n_values"] = r.n_values;
  j["failed_trials"] = r.failed_trials;
  j["all_passed"] = r.all_passed;
  json sums = json::array();
  for (const auto& s : r.summaries) {
    json m = json::array();
    for (const auto& e : s.t_moments) m.push_back(estimate_json(e));
    sums.push_back({{"n", s.n},
                    {"function", s.function},
                    {"lipschitz", s.lipschitz},
                    {"predicted",
                     {{"mean", s.pred_mean},
                      {"xi_coeff", s.pred_xi_coeff},
                      {"var_diag", s.pred_var_diag},
                      {"offdiag_sq", s.pred_esq},
                      {"offdiag_abs_sq", s.pred_abs_sq}}},
                    {"t_mean", estimate_json(s.t_mean)},
                    {"t_var", estimate_json(s.t_var)},
                    {"s_abs_sq", estimate_json(s.s_abs_sq)},
                    {"s_sq_re", estimate_json(s.s_sq_re)},
                    {"s_sq_im", estimate_json(s.s_sq_im)},
                    {"t_moments", m},
                    {"levy", {{"value", s.levy}, {"se", s.levy_se}}}});
  }
  j["summaries"] = sums;
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"n", c.n},
                      {"function", c.function},
                      {"estimate", c.estimate},
                      {"se", c.standard_error},
                      {"predicted", c.predicted},
                      {"tolerance", c.tolerance},
                      {"rule", c.rule},
                      {"passed", c.passed}});
  j["checks"] = checks;
  return j.dump(2);
}

RunResult result_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunResult r;
  r.schema = j.at("schema").get<std::string>();
  if (r.schema != kResultSchema) throw std::runtime_error("unsupported result schema '" + r.schema + "'");
  r.name = j.at("name").get<std::string>();
  r.ensemble = j.at("ensemble").get<std::string>();
  r.sigma2 = j.at("sigma2").get<double>();
  r.sigma4 = j.at("sigma4").get<double>();
  r.master_seed = j.at("master_seed").get<std::uint64_t>();
  r.trials = j.at("trials").get<long>();
  r.n_values = j.at("n_values").get<std::vector<std::size_t>>();
  r.failed_trials = j.at("failed_trials").get<long>();
  r.all_passed = j.at("all_passed").get<bool>();
  for (const auto& s : j.at("summaries")) {
    FunctionSummary f;
    f.n = s.at("n").get<std::size_t>();
    f.function = s.at("function").get<std::string>();
    f.lipschitz = s.at("lipschitz").get<bool>();
    const auto& p = s.at("predicted");
    f.pred_mean = p.at("mean").get<double>();
    f.pred_xi_coeff = p.at("xi_coeff").get<double>();
    f.pred_var_diag = p.at("var_diag").get<double>();
    f.pred_esq = p.at("offdiag_sq").get<double>();
    f.pred_abs_sq = p.at("offdiag_abs_sq").get<double>();
    f.t_mean = estimate_from(s.at("t_mean"));
    f.t_var = estimate_from(s.at("t_var"));
    f.s_abs_sq = estimate_from(s.at("s_abs_sq"));
    f.s_sq_re = estimate_from(s.at("s_sq_re"));
    f.s_sq_im = estimate_from(s.at("s_sq_im"));
    for (const auto& m : s.at("t_moments")) f.t_moments.push_back(estimate_from(m));
    f.levy = s.at("levy").at("value").get<double>();
    f.levy_se = s.at("levy").at("se").get<double>();
    r.summaries.push_back(f);
  }
  for (const auto& c : j.at("checks")) {
    CheckResult k;
    k.name = c.at("name").get<std::string>();
    k.n = c.at("n").get<std::size_t>();
    k.function = c.at("function").get<std::string>();
    k.estimate = c.at("estimate").get<double>();
    k.standard_error = c.at("se").get<double>();
    k.predicted = c.at("predicted").get<double>();
    k.tolerance = c.at("tolerance").get<double>();
    k.rule = c.at("rule").get<std::string>();
    k.passed = c.at("passed").get<bool>();
    r.checks.push_back(k);
  }
  return r;
}

OutputPaths OutputPaths::in_dir(const std::string& dir) {
  const std::filesystem::path d(dir);
  return {(d / "result.json").string(), (d / "trials.csv").string(), (d / "summary.txt").string()};
}

void write_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "n,trial,f_name,t_value,re_s,im_s,f11,re_f12,im_f12,seed\n";
  out << std::setprecision(17);
  for (const auto& r : records)
    out << r.n << ',' << r.trial << ',' << r.function << ',' << r.stat.t_value << ',' << r.stat.s_value.real() << ','
        << r.stat.s_value.imag() << ',' << r.stat.f11 << ',' << r.stat.f12.real() << ',' << r.stat.f12.imag() << ','
        << r.stat.seed << '\n';
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::string summary_text(const RunOutput& out) {
  const RunResult& r = out.result;
  std::ostringstream os;
  os << "experiment " << r.name << " (" << r.ensemble << ", sigma2=" << r.sigma2 << ", sigma4=" << r.sigma4
     << ")\n";
  os << "trials per n: " << r.trials << ", failed: " << r.failed_trials << ", master seed: " << r.master_seed << "\n";
  os << "wall time: " << std::fixed << std::setprecision(2) << out.wall_seconds << " s on " << out.threads
     << " thread(s)\n";
  os.unsetf(std::ios::fixed);
  for (const auto& s : r.summaries) {
    os << "\nn=" << s.n << " f=" << s.function << "\n";
    os << "  Var T  = " << s.t_var.value << " +- " << s.t_var.se << " (predicted " << s.pred_var_diag << ")\n";
    os << "  E|S|^2 = " << s.s_abs_sq.value << " +- " << s.s_abs_sq.se << " (predicted " << s.pred_abs_sq << ")\n";
    os << "  Levy   = " << s.levy << " +- " << s.levy_se << "\n";
  }
  os << "\nchecks:\n";
  long passed = 0;
  for (const auto& c : r.checks) {
    os << (c.passed ? "  PASS " : "  FAIL ") << c.name << " n=" << c.n;
    if (!c.function.empty()) os << " f=" << c.function;
    os << " estimate=" << c.estimate << " predicted=" << c.predicted << " tol=" << c.tolerance << " [" << c.rule
       << "]\n";
    passed += c.passed;
  }
  os << "\n" << passed << "/" << r.checks.size() << " checks passed\n";
  return os.str();
}

void emit_outputs(const RunOutput& out, const OutputPaths& paths) {
  for (const std::string& p : {paths.json, paths.csv, paths.summary}) {
    const auto parent = std::filesystem::path(p).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    if (ec) throw std::runtime_error(parent.string() + ": " + ec.message());
  }
  {
    std::ofstream f(paths.json);
    if (!f) throw std::runtime_error(paths.json + ": cannot open for writing");
    f << result_to_json(out.result) << '\n';
    if (!f) throw std::runtime_error(paths.json + ": write failed");
  }
  write_csv(out.records, paths.csv);
  {
    std::ofstream f(paths.summary);
    if (!f) throw std::runtime_error(paths.summary + ": cannot open for writing");
    f << summary_text(out);
    if (!f) throw std::runtime_error(paths.summary + ": write failed");
  }
}

std::vector<CheckResult> pleijel_battery(const BatteryOptions& opt, const std::vector<BVFunction>& functions,
                                         std::optional<ContourParams> params) {
  spectral::use_single_threaded_blas();
  const ContourParams p = params.value_or(ContourParams::for_dimension(opt.n, false));
  const std::size_t nf = functions.size();
  std::vector<double> ratio(static_cast<std::size_t>(opt.trials) * nf, 0.0);
  std::vector<double> abs_diff(ratio.size(), 0.0), reform(ratio.size(), 0.0);
  parallel_for(opt.trials, opt.threads, [&](long t) {
    const WignerMatrix h = sample_wigner(opt.ensemble, opt.n, trial_seed(opt.seed, opt.n, t));
    auto spec = std::make_shared<const spectral::EntrySpectrum>(spectral::entry_spectrum(h));
    const StieltjesSource src = g11_source(spec);
    const auto eig = spectral::eigenvalues(h);
    (void)eig;
    // Oracle: full eigendecomposition, independent of the entry spectrum.
    std::vector<double> lambda;
    std::vector<double> weight;
    if (h.is_real()) {
      const auto e = spectral::eigh(h.real_entries());
      for (Eigen::Index k = 0; k < e.values.size(); ++k) {
        lambda.push_back(e.values(k));
        weight.push_back(e.vectors(0, k) * e.vectors(0, k));
      }
    } else {
      const auto e = spectral::eigh(h.complex_entries());
      for (Eigen::Index k = 0; k < e.values.size(); ++k) {
        lambda.push_back(e.values(k));
        weight.push_back(std::norm(e.vectors(0, k)));
      }
    }
    for (std::size_t i = 0; i < nf; ++i) {
      double exact = 0.0;
      for (std::size_t k = 0; k < lambda.size(); ++k) exact += functions[i](lambda[k]) * weight[k];
      const PleijelResult pr = pleijel_integrate(src, functions[i], p);
      const std::size_t at = static_cast<std::size_t>(t) * nf + i;
      abs_diff[at] = std::abs(pr.value - exact);
      ratio[at] = abs_diff[at] / pr.error_budget;
      reform[at] = pr.reform_discrepancy;
    }
  });
  std::vector<CheckResult> out;
  for (std::size_t i = 0; i < nf; ++i) {
    double worst = 0.0, worst_diff = 0.0, worst_reform = 0.0;
    for (long t = 0; t < opt.trials; ++t) {
      const std::size_t at = static_cast<std::size_t>(t) * nf + i;
      worst = std::max(worst, ratio[at]);
      worst_diff = std::max(worst_diff, abs_diff[at]);
      worst_reform = std::max(worst_reform, reform[at]);
    }
    CheckResult c;
    c.name = "pleijel_oracle";
    c.n = opt.n;
    c.function = functions[i].name();
    c.estimate = worst;
    c.standard_error = worst_diff;
    c.tolerance = 1.0;
    c.rule = "max over trials of |pleijel - f(H)_11| / error_budget <= 1";
    c.passed = worst <= 1.0;
    out.push_back(c);
    CheckResult s;
    s.name = "pleijel_reform";
    s.n = opt.n;
    s.function = functions[i].name();
    s.estimate = worst_reform;
    s.tolerance = 1e-10;
    s.rule = "symmetric region vs 2 Re form";
    s.passed = worst_reform <= 1e-10;
    out.push_back(s);
  }
  return out;
}

std::vector<CheckResult> local_law_battery(const BatteryOptions& opt, const std::vector<double>& etas,
                                           double pass_fraction) {
  spectral::use_single_threaded_blas();
  const double N = static_cast<double>(opt.n);
  std::vector<Complex> zs;
  for (double eta : etas) zs.emplace_back(0.0, eta);
  std::vector<std::vector<LocalLawResiduals>> res(static_cast<std::size_t>(opt.trials));
  parallel_for(opt.trials, opt.threads, [&](long t) {
    const WignerMatrix h = sample_wigner(opt.ensemble, opt.n, trial_seed(opt.seed, opt.n, t));
    res[static_cast<std::size_t>(t)] = local_law_residuals(h, zs);
  });
  std::vector<CheckResult> out;
  for (std::size_t e = 0; e < etas.size(); ++e) {
    const double eta = etas[e];
    const double avg_env = std::pow(N, 0.1) / (N * eta);
    const double entry_env = std::pow(N, 0.1) / std::sqrt(N * eta);
    long avg_in = 0, entry_in = 0;
    for (const auto& r : res) {
      avg_in += r[e].avg_residual <= avg_env;
      entry_in += r[e].max_entry_residual <= entry_env;
    }
    for (int which = 0; which < 2; ++which) {
      CheckResult c;
      c.name = std::string(which == 0 ? "local_law_avg" : "local_law_entry") + "(eta=" + num(eta) + ")";
      c.n = opt.n;
      c.estimate = static_cast<double>(which == 0 ? avg_in : entry_in) / static_cast<double>(opt.trials);
      c.predicted = 1.0;
      c.standard_error = which == 0 ? avg_env : entry_env;
      c.tolerance = 1.0 - pass_fraction;
      c.rule = "fraction inside envelope >= " + num(pass_fraction);
      c.passed = c.estimate >= pass_fraction;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<CheckResult> covariance_battery(const BatteryOptions& opt, const CovarianceTargets& targets) {
  SimulationPlan plan;
  plan.ensemble = opt.ensemble;
  plan.n = opt.n;
  plan.trials = opt.trials;
  plan.master_seed = opt.seed;
  plan.threads = opt.threads;
  plan.zs = covariance_points(targets);
  const auto samples = simulate(plan);
  return covariance_checks(samples, plan.zs, opt.n, opt.ensemble.sigma2, opt.ensemble.sigma4, targets);
}

}  // namespace wigfluct
