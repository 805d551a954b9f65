// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "helio/dataset.hpp"
#include "helio/report.hpp"

namespace helio {

enum class Method { sh, nn, pinn };

const char* method_name(Method m);
Method parse_method(const std::string& name);

/// Batch experiment description. Loaded from JSON; unknown keys are rejected.
struct RunConfig {
  Scenario scenario = Scenario::interp;
  std::vector<double> frequencies{2067, 4134, 6202, 8269, 10336, 12403, 14470};
  std::vector<std::uint64_t> seeds{1};
  std::vector<Method> methods{Method::sh, Method::nn, Method::pinn};
  double speed_of_sound = 343.0;

  struct Synth {
    std::optional<int> order;  ///< default: order rule at each frequency
    double decay = 0.15;
  } synth;

  struct Data {
    std::string source = "synth";  ///< "synth" or "files"
    std::string dir;               ///< dataset directory when source is "files"
  } data;

  struct Sh {
    std::optional<int> order;     ///< default: order rule
    std::optional<double> gamma;  ///< default: 1e-6 (interp) or the built-in table (extrap)
  } sh;

  /// Shared by NN and PINN so the two differ only in the PDE loss.
  struct Network {
    int depth = 3;
    std::optional<int> width;  ///< default: width rule
    long epochs = 100000;
    double lr = 1e-3;
    long log_every = 1000;
  } network;

  struct Output {
    std::string dir = "helio_out";
    bool checkpoints = true;
  } output;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& cfg);

/// Resolved per-frequency settings.
int synth_order(const RunConfig& cfg, double freq_hz);
int fit_order(const RunConfig& cfg, double freq_hz);
double fit_gamma(const RunConfig& cfg, double freq_hz);
int network_width(const RunConfig& cfg, double freq_hz);
std::string method_spec(const RunConfig& cfg, Method m, double freq_hz);

/// Seed of the synthetic field for one subject at one frequency.
std::uint64_t field_seed(std::uint64_t subject_seed, double freq_hz);
/// Initialization seed of one part network (shared by NN and PINN).
std::uint64_t network_seed(std::uint64_t subject_seed, double freq_hz, int part);

/// File name of a dataset written by the synth step.
std::string dataset_file_name(Scenario s, std::uint64_t seed, double freq_hz);

/// Normalized synthetic dataset for one (subject, frequency).
FieldDataset make_dataset(const RunConfig& cfg, std::uint64_t seed, double freq_hz);

/// Dataset from synthesis or from the configured directory.
FieldDataset load_dataset(const RunConfig& cfg, std::uint64_t seed, double freq_hz);

struct PlannedJob {
  std::string method;
  std::string spec;
  double freq_hz = 0.0;
  std::uint64_t seed = 0;
  std::string part;  ///< empty for SH
};

std::vector<PlannedJob> plan_jobs(const RunConfig& cfg);

struct ExperimentOptions {
  int jobs = 1;
  /// When set, per-run checkpoints are written here.
  std::optional<std::filesystem::path> checkpoint_dir;
};

/// Runs every (method, seed, frequency) combination. Failures become rows
/// with a NaN error and a failure message; other rows are unaffected.
/// The result does not depend on the number of jobs.
ErrorReport run_experiment(const RunConfig& cfg, const ExperimentOptions& opts);

}  // namespace helio
