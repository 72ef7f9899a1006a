#include "wigfluct/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace wigfluct {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1 << ":" << node.Mark().column + 1;
    os << ": " << field << ": " << msg;
    throw ConfigError(os.str());
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, field, "cannot convert '" + node.Scalar() + "'");
    }
  }

  void only_keys(const YAML::Node& map, const std::string& field, const std::set<std::string>& allowed) const {
    if (!map.IsMap()) fail(map, field, "expected a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, field.empty() ? key : field + "." + key, "unknown key");
    }
  }

 private:
  std::string source_;
};

EnsembleSpec read_ensemble(const Reader& r, const YAML::Node& node) {
  try {
    if (node.IsScalar()) return builtin_spec(node.as<std::string>());
    r.only_keys(node, "ensemble", {"name", "builtin", "symmetry", "off_diag_law", "sigma2", "sigma4", "diag_law", "s_diag"});
    EnsembleSpec s;
    if (node["builtin"]) s = builtin_spec(r.scalar<std::string>(node["builtin"], "ensemble.builtin"));
    if (node["name"]) s.name = r.scalar<std::string>(node["name"], "ensemble.name");
    if (node["symmetry"]) s.symmetry = symmetry_from_string(r.scalar<std::string>(node["symmetry"], "ensemble.symmetry"));
    if (node["off_diag_law"])
      s.off_diag_law = entry_law_from_string(r.scalar<std::string>(node["off_diag_law"], "ensemble.off_diag_law"));
    if (node["sigma2"]) s.sigma2 = r.scalar<double>(node["sigma2"], "ensemble.sigma2");
    if (node["diag_law"]) s.diag_law = entry_law_from_string(r.scalar<std::string>(node["diag_law"], "ensemble.diag_law"));
    if (node["s_diag"]) s.s_diag = r.scalar<double>(node["s_diag"], "ensemble.s_diag");
    if (node["sigma4"])
      s.sigma4 = r.scalar<double>(node["sigma4"], "ensemble.sigma4");
    else
      s.sigma4 = implied_sigma4(s);
    if (s.name.empty()) s.name = "custom";
    validate(s);
    return s;
  } catch (const std::invalid_argument& e) {
    r.fail(node, "ensemble", e.what());
  }
}

FunctionSpec read_function(const Reader& r, const YAML::Node& node, const std::string& field) {
  if (!node.IsMap()) r.fail(node, field, "expected a mapping with 'kind'");
  FunctionSpec f;
  if (!node["kind"]) r.fail(node, field, "missing 'kind'");
  f.kind = r.scalar<std::string>(node["kind"], field + ".kind");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (key == "kind") continue;
    f.params[key] = r.scalar<double>(kv.second, field + "." + key);
  }
  try {
    (void)f.build();
  } catch (const std::invalid_argument& e) {
    r.fail(node, field, e.what());
  }
  return f;
}

}  // namespace

ContourParams ContourOverrides::apply(ContourParams base) const {
  if (eta0) base.eta0 = *eta0;
  if (M) base.M = *M;
  if (L) base.L = *L;
  if (grading) base.grading = *grading;
  return base;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials: must be at least 1");
  if (n_values.empty()) throw ConfigError("n_values: must not be empty");
  if (!std::is_sorted(n_values.begin(), n_values.end())) throw ConfigError("n_values: must be sorted ascending");
  for (auto n : n_values)
    if (n < 4) throw ConfigError("n_values: dimensions must be at least 4");
  if (functions.empty()) throw ConfigError("functions: at least one function is required");
  if (checks.k_max < 1 || checks.k_max > 6) throw ConfigError("checks.k_max: must lie in [1, 6]");
  if (threads < 1) throw ConfigError("threads: must be at least 1");
  if (checks.pleijel_every < 1) throw ConfigError("checks.pleijel_every: must be at least 1");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  const Reader r(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": syntax: " << e.msg;
    throw ConfigError(os.str());
  }
  r.only_keys(root, "", {"name", "ensemble", "n_values", "trials", "functions", "contour", "checks", "master_seed",
                         "output", "threads"});
  ExperimentConfig cfg;
  if (!root["ensemble"]) r.fail(root, "ensemble", "required field missing");
  if (!root["functions"]) r.fail(root, "functions", "required field missing");
  if (root["name"]) cfg.name = r.scalar<std::string>(root["name"], "name");
  cfg.ensemble = read_ensemble(r, root["ensemble"]);
  if (const auto n = root["n_values"]) {
    if (!n.IsSequence()) r.fail(n, "n_values", "expected a list");
    cfg.n_values.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      const long v = r.scalar<long>(n[i], "n_values[" + std::to_string(i) + "]");
      if (v < 4) r.fail(n[i], "n_values[" + std::to_string(i) + "]", "dimension must be at least 4");
      cfg.n_values.push_back(static_cast<std::size_t>(v));
    }
    if (!std::is_sorted(cfg.n_values.begin(), cfg.n_values.end())) r.fail(n, "n_values", "must be sorted ascending");
  }
  if (root["trials"]) {
    cfg.trials = r.scalar<long>(root["trials"], "trials");
    if (cfg.trials < 1) r.fail(root["trials"], "trials", "must be at least 1");
  }
  const auto fs = root["functions"];
  if (!fs.IsSequence() || fs.size() == 0) r.fail(fs, "functions", "expected a non-empty list");
  for (std::size_t i = 0; i < fs.size(); ++i)
    cfg.functions.push_back(read_function(r, fs[i], "functions[" + std::to_string(i) + "]"));
  if (const auto c = root["contour"]) {
    r.only_keys(c, "contour", {"eta0", "M", "L", "grading"});
    if (c["eta0"]) cfg.contour.eta0 = r.scalar<double>(c["eta0"], "contour.eta0");
    if (c["M"]) cfg.contour.M = r.scalar<double>(c["M"], "contour.M");
    if (c["L"]) cfg.contour.L = r.scalar<double>(c["L"], "contour.L");
    if (c["grading"]) cfg.contour.grading = r.scalar<double>(c["grading"], "contour.grading");
  }
  if (const auto c = root["checks"]) {
    r.only_keys(c, "checks", {"mean", "variance", "moments", "k_max", "levy", "levy_max", "pleijel_oracle",
                              "pleijel_every", "exx", "local_law", "local_law_trials", "rate_c", "batches"});
    auto flag = [&](const char* key, bool& out) {
      if (c[key]) out = r.scalar<bool>(c[key], std::string("checks.") + key);
    };
    flag("mean", cfg.checks.mean);
    flag("variance", cfg.checks.variance);
    flag("moments", cfg.checks.moments);
    flag("levy", cfg.checks.levy);
    flag("pleijel_oracle", cfg.checks.pleijel_oracle);
    flag("exx", cfg.checks.exx);
    flag("local_law", cfg.checks.local_law);
    if (c["k_max"]) {
      cfg.checks.k_max = r.scalar<int>(c["k_max"], "checks.k_max");
      if (cfg.checks.k_max < 1 || cfg.checks.k_max > 6) r.fail(c["k_max"], "checks.k_max", "must lie in [1, 6]");
    }
    if (c["levy_max"]) cfg.checks.levy_max = r.scalar<double>(c["levy_max"], "checks.levy_max");
    if (c["pleijel_every"]) cfg.checks.pleijel_every = r.scalar<int>(c["pleijel_every"], "checks.pleijel_every");
    if (c["local_law_trials"]) cfg.checks.local_law_trials = r.scalar<int>(c["local_law_trials"], "checks.local_law_trials");
    if (c["rate_c"]) cfg.checks.rate_c = r.scalar<double>(c["rate_c"], "checks.rate_c");
    if (c["batches"]) cfg.checks.batches = r.scalar<int>(c["batches"], "checks.batches");
  }
  if (root["master_seed"]) cfg.master_seed = r.scalar<std::uint64_t>(root["master_seed"], "master_seed");
  if (const auto o = root["output"]) {
    r.only_keys(o, "output", {"dir"});
    if (o["dir"]) cfg.output_dir = r.scalar<std::string>(o["dir"], "output.dir");
  }
  if (root["threads"]) {
    cfg.threads = r.scalar<int>(root["threads"], "threads");
    if (cfg.threads < 1) r.fail(root["threads"], "threads", "must be at least 1");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace wigfluct
