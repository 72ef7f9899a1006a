#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "wigfluct/harness.hpp"

using namespace wigfluct;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.name = "small";
  c.ensemble = goe_spec();
  c.n_values = {40, 60};
  c.trials = 120;
  c.functions = {{"indicator", {{"a", -1.0}, {"b", 1.0}}}, {"monomial", {{"k", 2.0}}}};
  c.checks.pleijel_oracle = true;
  c.checks.pleijel_every = 50;
  c.checks.exx = true;
  c.checks.local_law = true;
  c.checks.local_law_trials = 10;
  c.checks.batches = 20;
  c.master_seed = 99;
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("wigfluct_test_" + name);
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(1000, 4, [&](long i) { hits[static_cast<std::size_t>(i)]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, RethrowsAfterJoining) {
  std::atomic<int> done{0};
  EXPECT_THROW(parallel_for(100, 3,
                            [&](long i) {
                              if (i == 17) throw std::runtime_error("boom");
                              done++;
                            }),
               std::runtime_error);
  EXPECT_EQ(done.load(), 99);
}

TEST(CompareMoments, GaussianSamplesPass) {
  Engine eng = make_engine(5);
  std::normal_distribution<double> d(0.0, std::sqrt(1.5));
  std::vector<double> xs(5000);
  for (auto& x : xs) x = d(eng);
  for (const auto& v : compare_moments(xs, 1.5, 6, 0.0)) EXPECT_TRUE(v.passed) << v.k;
  for (auto& x : xs) x += 1.0;
  EXPECT_FALSE(compare_moments(xs, 1.5, 1, rate_term(1000, true, 5.0))[0].passed);
  EXPECT_THROW(compare_moments(xs, 1.5, 7, 0.0), std::invalid_argument);
}

TEST(CompareMoments, GueSquareSecondMoment) {
  SimulationPlan plan;
  plan.ensemble = gue_spec();
  plan.n = 150;
  plan.trials = 1500;
  plan.master_seed = 3;
  plan.functions = {bv::monomial(2)};
  plan.predictions = {predict(plan.functions[0], 0.0, 2.0)};
  std::vector<double> t;
  for (const auto& s : simulate(plan)) t.push_back(s.stats[0].t_value);
  const auto v = compare_moments(t, 1.0, 2, rate_term(150, true, 5.0));
  EXPECT_TRUE(v[1].passed) << v[1].empirical;
}

TEST(RateTerm, Exponents) {
  EXPECT_DOUBLE_EQ(rate_term(10000, true, 5.0), 0.05);
  EXPECT_NEAR(rate_term(64, false, 2.0), 1.0, 1e-14);
}

TEST(Simulate, IndependentOfThreadCount) {
  SimulationPlan plan;
  plan.ensemble = gue_spec();
  plan.n = 30;
  plan.trials = 40;
  plan.master_seed = 11;
  plan.functions = builtin_library();
  for (const auto& f : plan.functions) plan.predictions.push_back(predict(f, 0.0, 2.0));
  plan.zs = {Complex(0.0, 1.0)};
  const auto a = simulate(plan);
  plan.threads = 6;
  const auto b = simulate(plan);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_EQ(a[t].seed, b[t].seed);
    EXPECT_EQ(a[t].seed, trial_seed(11, 30, static_cast<long>(t)));
    for (std::size_t i = 0; i < a[t].stats.size(); ++i) {
      EXPECT_EQ(a[t].stats[i].t_value, b[t].stats[i].t_value);
      EXPECT_EQ(a[t].stats[i].s_value, b[t].stats[i].s_value);
    }
    EXPECT_EQ(a[t].kernels[0].x_value, b[t].kernels[0].x_value);
  }
}

TEST(RunExperiment, DeterministicAcrossThreads) {
  ExperimentConfig c = small_config();
  const RunOutput one = run_experiment(c);
  const RunOutput again = run_experiment(c);
  c.threads = 8;
  const RunOutput eight = run_experiment(c);
  EXPECT_EQ(result_to_json(one.result), result_to_json(again.result));
  EXPECT_EQ(result_to_json(one.result), result_to_json(eight.result));
  EXPECT_TRUE(one.result == eight.result);
}

TEST(RunExperiment, ChecksAppearOnceWithProvenance) {
  const RunOutput out = run_experiment(small_config());
  std::set<std::tuple<std::string, std::size_t, std::string>> keys;
  for (const auto& c : out.result.checks) {
    EXPECT_TRUE(keys.insert({c.name, c.n, c.function}).second) << c.name;
    EXPECT_FALSE(c.rule.empty()) << c.name;
  }
  for (const char* name : {"mean_T", "variance_T", "abs_sq_S", "moment_T_4", "levy_T", "pleijel_oracle"})
    EXPECT_TRUE(keys.count({name, 40, "x^2"})) << name;
  EXPECT_TRUE(keys.count({"spectral_radius_le_3", 60, ""}));
  EXPECT_EQ(out.result.summaries.size(), 4u);
  for (const auto& c : out.result.checks) {
    if (c.name == "pleijel_oracle") {
      EXPECT_TRUE(c.passed) << c.function << " " << c.estimate;
    }
  }
}

TEST(RunExperiment, IdentityStatisticHasZeroVariance) {
  ExperimentConfig c;
  c.ensemble = goe_spec();
  c.n_values = {200};
  c.trials = 500;
  c.functions = {{"monomial", {{"k", 1.0}, {"flat", 2.6}}}};
  const RunOutput out = run_experiment(c);
  bool seen = false;
  for (const auto& ch : out.result.checks)
    if (ch.name == "variance_T") {
      seen = true;
      EXPECT_TRUE(ch.passed);
      EXPECT_LT(ch.estimate, 1e-18);
    }
  EXPECT_TRUE(seen);
}

TEST(Outputs, RoundTripAndRowCount) {
  const RunOutput out = run_experiment(small_config());
  const RunResult back = result_from_json(result_to_json(out.result));
  EXPECT_TRUE(back == out.result);
  const auto dir = temp_dir("rows");
  emit_outputs(out, OutputPaths::in_dir(dir.string()));
  const std::string csv = read_file((dir / "trials.csv").string());
  const long rows = std::count(csv.begin(), csv.end(), '\n') - 1;
  EXPECT_EQ(rows, 120 * 2 * 2);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,trial,f_name,t_value,re_s,im_s,f11,re_f12,im_f12,seed");
  EXPECT_TRUE(result_from_json(read_file((dir / "result.json").string())) == out.result);
  EXPECT_NE(read_file((dir / "summary.txt").string()).find("checks passed"), std::string::npos);
}

TEST(Outputs, EmptyResult) {
  RunOutput empty;
  const auto dir = temp_dir("empty");
  emit_outputs(empty, OutputPaths::in_dir(dir.string()));
  EXPECT_EQ(read_file((dir / "trials.csv").string()), "n,trial,f_name,t_value,re_s,im_s,f11,re_f12,im_f12,seed\n");
  EXPECT_TRUE(result_from_json(read_file((dir / "result.json").string())) == empty.result);
}

TEST(Outputs, IoErrorsNameThePath) {
  RunOutput empty;
  OutputPaths p{"/proc/forbidden/result.json", "/proc/forbidden/t.csv", "/proc/forbidden/s.txt"};
  try {
    emit_outputs(empty, p);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/proc/forbidden"), std::string::npos) << e.what();
  }
  EXPECT_THROW(result_from_json(R"({"schema": "other/9"})"), std::runtime_error);
}

TEST(Batteries, PleijelAgainstEigendecomposition) {
  BatteryOptions o{gue_spec(), 50, 3, 1, 1};
  for (const auto& c : pleijel_battery(o, builtin_library())) EXPECT_TRUE(c.passed) << c.name << " " << c.function;
}

TEST(Batteries, CovarianceChecksAreComplete) {
  BatteryOptions o{goe_spec(), 40, 400, 2, 1};
  const auto checks = covariance_battery(o, default_covariance_targets().front());
  int exx = 0, wick = 0;
  for (const auto& c : checks) {
    exx += c.name.rfind("exx", 0) == 0;
    wick += c.name.rfind("wick", 0) == 0;
  }
  EXPECT_EQ(exx, 4);
  EXPECT_EQ(wick, 2);
}

TEST(FormatComplex, Signs) {
  EXPECT_EQ(format_complex(Complex(0.5, -0.5)), "0.5-0.5i");
  EXPECT_EQ(format_complex(Complex(0.0, 1.0)), "0+1i");
}
