#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wigfluct/bvfunc.hpp"
#include "wigfluct/ensembles.hpp"
#include "wigfluct/pleijel.hpp"

namespace wigfluct {

/// Parse or validation failure, with "source:line:column: field: message".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FunctionSpec {
  std::string kind;
  std::map<std::string, double> params;

  BVFunction build() const { return bv::make(kind, params); }
  bool operator==(const FunctionSpec&) const = default;
};

struct ContourOverrides {
  std::optional<double> eta0;
  std::optional<double> M;
  std::optional<double> L;
  std::optional<double> grading;

  ContourParams apply(ContourParams base) const;
  bool operator==(const ContourOverrides&) const = default;
};

struct CheckSelection {
  bool mean = true;
  bool variance = true;
  bool moments = true;
  int k_max = 4;
  bool levy = true;
  double levy_max = 0.05;
  bool pleijel_oracle = false;
  int pleijel_every = 100;
  bool exx = false;
  bool local_law = false;
  int local_law_trials = 200;
  double rate_c = 5.0;
  int batches = 50;

  bool operator==(const CheckSelection&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  EnsembleSpec ensemble;
  std::vector<std::size_t> n_values{200};
  long trials = 100;
  std::vector<FunctionSpec> functions;
  ContourOverrides contour;
  CheckSelection checks;
  std::uint64_t master_seed = 1;
  std::string output_dir = "results";
  int threads = 1;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Parses the YAML config format; `source` names the input in diagnostics.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

}  // namespace wigfluct
