// SPDX-License-Identifier: Apache-2.0
#include "helio/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "helio/error.hpp"
#include "helio/format.hpp"
#include "helio/pinn.hpp"
#include "helio/rng.hpp"

namespace helio {

const char* method_name(Method m) {
  switch (m) {
    case Method::sh: return "SH";
    case Method::nn: return "NN";
    case Method::pinn: return "PINN";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "SH") return Method::sh;
  if (name == "NN") return Method::nn;
  if (name == "PINN") return Method::pinn;
  throw ConfigError("unknown method '" + name + "' (expected SH, NN or PINN)");
}

// ---------------------------------------------------------------------------
// Config document

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read_opt(const json& obj, const char* key, std::optional<T>& out) {
  if (!obj.contains(key)) return;
  if (obj.at(key).is_null())
    out.reset();
  else
    out = obj.at(key).get<T>();
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <typename T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  try {
    reject_unknown(j, {"scenario", "frequencies", "seeds", "methods", "speed_of_sound", "synth",
                       "data", "sh", "network", "output"},
                   "config");
    if (j.contains("scenario")) cfg.scenario = parse_scenario(j.at("scenario").get<std::string>());
    read(j, "frequencies", cfg.frequencies);
    read(j, "seeds", cfg.seeds);
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : j.at("methods")) cfg.methods.push_back(parse_method(m.get<std::string>()));
    }
    read(j, "speed_of_sound", cfg.speed_of_sound);
    if (j.contains("synth")) {
      const auto& s = j.at("synth");
      reject_unknown(s, {"order", "decay"}, "synth");
      read_opt(s, "order", cfg.synth.order);
      read(s, "decay", cfg.synth.decay);
    }
    if (j.contains("data")) {
      const auto& d = j.at("data");
      reject_unknown(d, {"source", "dir"}, "data");
      read(d, "source", cfg.data.source);
      read(d, "dir", cfg.data.dir);
    }
    if (j.contains("sh")) {
      const auto& s = j.at("sh");
      reject_unknown(s, {"order", "gamma"}, "sh");
      read_opt(s, "order", cfg.sh.order);
      read_opt(s, "gamma", cfg.sh.gamma);
    }
    if (j.contains("network")) {
      const auto& n = j.at("network");
      reject_unknown(n, {"depth", "width", "epochs", "lr", "log_every"}, "network");
      read(n, "depth", cfg.network.depth);
      read_opt(n, "width", cfg.network.width);
      read(n, "epochs", cfg.network.epochs);
      read(n, "lr", cfg.network.lr);
      read(n, "log_every", cfg.network.log_every);
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      reject_unknown(o, {"dir", "checkpoints"}, "output");
      read(o, "dir", cfg.output.dir);
      read(o, "checkpoints", cfg.output.checkpoints);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  if (cfg.frequencies.empty()) fail("frequencies must be nonempty");
  for (double f : cfg.frequencies)
    if (!(f > 0.0)) fail("frequencies must be positive");
  if (cfg.seeds.empty()) fail("seeds must be nonempty");
  if (std::set<double>(cfg.frequencies.begin(), cfg.frequencies.end()).size() != cfg.frequencies.size())
    fail("frequencies must be distinct");
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size())
    fail("seeds must be distinct");
  if (std::set<Method>(cfg.methods.begin(), cfg.methods.end()).size() != cfg.methods.size())
    fail("methods must be distinct");
  if (!(cfg.speed_of_sound > 0.0)) fail("speed_of_sound must be positive");
  if (cfg.synth.order && *cfg.synth.order < 0) fail("synth.order must be nonnegative");
  if (!(cfg.synth.decay > 0.0)) fail("synth.decay must be positive");
  if (cfg.data.source != "synth" && cfg.data.source != "files")
    fail("data.source must be 'synth' or 'files'");
  if (cfg.data.source == "files" && cfg.data.dir.empty()) fail("data.dir is required for file input");
  if (cfg.sh.order && *cfg.sh.order < 0) fail("sh.order must be nonnegative");
  if (cfg.sh.gamma && !(*cfg.sh.gamma >= 0.0)) fail("sh.gamma must be nonnegative");
  if (cfg.network.depth < 1) fail("network.depth must be at least 1");
  if (cfg.network.width && *cfg.network.width < 1) fail("network.width must be at least 1");
  if (cfg.network.epochs < 1) fail("network.epochs must be at least 1");
  if (!(cfg.network.lr > 0.0)) fail("network.lr must be positive");
  if (cfg.network.log_every < 0) fail("network.log_every must be nonnegative");
  return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(method_name(m));
  return {
      {"scenario", scenario_name(cfg.scenario)},
      {"frequencies", cfg.frequencies},
      {"seeds", cfg.seeds},
      {"methods", methods},
      {"speed_of_sound", cfg.speed_of_sound},
      {"synth", {{"order", opt_json(cfg.synth.order)}, {"decay", cfg.synth.decay}}},
      {"data", {{"source", cfg.data.source}, {"dir", cfg.data.dir}}},
      {"sh", {{"order", opt_json(cfg.sh.order)}, {"gamma", opt_json(cfg.sh.gamma)}}},
      {"network",
       {{"depth", cfg.network.depth},
        {"width", opt_json(cfg.network.width)},
        {"epochs", cfg.network.epochs},
        {"lr", cfg.network.lr},
        {"log_every", cfg.network.log_every}}},
      {"output", {{"dir", cfg.output.dir}, {"checkpoints", cfg.output.checkpoints}}},
  };
}

int synth_order(const RunConfig& cfg, double freq_hz) {
  return cfg.synth.order.value_or(sh_order_for_freq(freq_hz));
}

int fit_order(const RunConfig& cfg, double freq_hz) {
  return cfg.sh.order.value_or(sh_order_for_freq(freq_hz));
}

double fit_gamma(const RunConfig& cfg, double freq_hz) {
  if (cfg.sh.gamma) return *cfg.sh.gamma;
  return cfg.scenario == Scenario::interp ? 1e-6 : extrap_gamma_for_freq(freq_hz);
}

int network_width(const RunConfig& cfg, double freq_hz) {
  return cfg.network.width.value_or(pinn_width_for_freq(freq_hz));
}

std::string method_spec(const RunConfig& cfg, Method m, double freq_hz) {
  if (m == Method::sh)
    return "U=" + std::to_string(fit_order(cfg, freq_hz)) + ";gamma=" + format_double(fit_gamma(cfg, freq_hz));
  return "L=" + std::to_string(cfg.network.depth) + ";W=" + std::to_string(network_width(cfg, freq_hz)) +
         ";epochs=" + std::to_string(cfg.network.epochs) + ";lr=" + format_double(cfg.network.lr);
}

std::uint64_t field_seed(std::uint64_t subject_seed, double freq_hz) {
  return mix_seed(subject_seed, static_cast<std::uint64_t>(std::llround(freq_hz * 1000.0)));
}

std::uint64_t network_seed(std::uint64_t subject_seed, double freq_hz, int part) {
  return mix_seed(field_seed(subject_seed, freq_hz), 0x5EED0000ULL + static_cast<std::uint64_t>(part));
}

std::string dataset_file_name(Scenario s, std::uint64_t seed, double freq_hz) {
  return std::string(scenario_name(s)) + "_seed" + std::to_string(seed) + "_f" +
         format_double(freq_hz) + ".csv";
}

FieldDataset make_dataset(const RunConfig& cfg, std::uint64_t seed, double freq_hz) {
  const ShModel truth =
      synth_coeffs({synth_order(cfg, freq_hz), field_seed(seed, freq_hz), cfg.synth.decay});
  return normalize(synth_field(truth, build_grid(cfg.scenario), freq_hz));
}

FieldDataset load_dataset(const RunConfig& cfg, std::uint64_t seed, double freq_hz) {
  if (cfg.data.source == "synth") return make_dataset(cfg, seed, freq_hz);
  const auto path = std::filesystem::path(cfg.data.dir) / dataset_file_name(cfg.scenario, seed, freq_hz);
  FieldDataset ds = read_dataset_csv(path);
  if (ds.freq_hz != freq_hz)
    throw ConfigError(path.string() + " holds frequency " + format_double(ds.freq_hz) + ", expected " +
                      format_double(freq_hz));
  return ds;
}

std::vector<PlannedJob> plan_jobs(const RunConfig& cfg) {
  std::vector<PlannedJob> jobs;
  for (Method m : cfg.methods)
    for (double f : cfg.frequencies)
      for (std::uint64_t s : cfg.seeds) {
        const std::string spec = method_spec(cfg, m, f);
        if (m == Method::sh) {
          jobs.push_back({method_name(m), spec, f, s, ""});
        } else {
          for (Part p : all_parts) jobs.push_back({method_name(m), spec, f, s, part_name(p)});
        }
      }
  return jobs;
}

// ---------------------------------------------------------------------------

namespace {

struct Case {
  std::uint64_t seed;
  double freq_hz;
  FieldDataset ds;
  std::array<PartData, 4> parts;
  std::vector<Direction> unknown_dirs;
  std::vector<cdouble> truth;
  double peak_known = 0.0;
};

struct Task {
  Method method;
  std::size_t case_index;
  int part = -1;  // network tasks only
};

struct TaskResult {
  std::optional<ShModel> sh;
  std::optional<TrainResult> net;
  std::string failure;
};

std::string base_name(Method m, const RunConfig& cfg, const Case& c) {
  std::string n = method_name(m);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return n + "_" + scenario_name(cfg.scenario) + "_seed" + std::to_string(c.seed) + "_f" +
         format_double(c.freq_hz);
}

void fill_metrics(ReportRow& row, const Case& c, const std::vector<cdouble>& est) {
  row.error_db = upsample_error(c.truth, est);
  row.peak_known = c.peak_known;
  row.peak_unknown = 0.0;
  for (const auto& e : est) row.peak_unknown = std::max(row.peak_unknown, std::abs(e));
}

}  // namespace

ErrorReport run_experiment(const RunConfig& cfg, const ExperimentOptions& opts) {
  ErrorReport report;
  if (cfg.methods.empty()) return report;

  std::vector<Case> cases;
  for (std::uint64_t seed : cfg.seeds)
    for (double f : cfg.frequencies) {
      Case c{seed, f, load_dataset(cfg, seed, f), {}, {}, {}, 0.0};
      c.parts = split_parts(c.ds);
      c.unknown_dirs = c.ds.directions(SetTag::unknown);
      c.truth = c.ds.pressures(SetTag::unknown);
      if (c.truth.empty()) throw ConfigError("dataset for seed " + std::to_string(seed) + " has no unknown entries");
      for (const auto& p : c.ds.pressures(SetTag::known)) c.peak_known = std::max(c.peak_known, std::abs(p));
      cases.push_back(std::move(c));
    }

  std::vector<Task> tasks;
  for (Method m : cfg.methods)
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
      if (m == Method::sh)
        tasks.push_back({m, ci, -1});
      else
        for (int p = 0; p < 4; ++p) tasks.push_back({m, ci, p});
    }

  std::vector<TaskResult> results(tasks.size());
  auto run_task = [&](std::size_t ti) {
    const Task& t = tasks[ti];
    const Case& c = cases[t.case_index];
    TaskResult& out = results[ti];
    try {
      if (t.method == Method::sh) {
        out.sh = sh_fit(c.ds.pressures(SetTag::known), c.ds.directions(SetTag::known),
                        {fit_gamma(cfg, c.freq_hz), fit_order(cfg, c.freq_hz)});
      } else {
        TrainConfig tc;
        tc.spec = {cfg.network.depth, network_width(cfg, c.freq_hz)};
        tc.epochs = cfg.network.epochs;
        tc.lr = cfg.network.lr;
        tc.pde_loss_enabled = t.method == Method::pinn;
        tc.seed = network_seed(c.seed, c.freq_hz, t.part);
        tc.log_every = cfg.network.log_every;
        const PartData& pd = c.parts[static_cast<std::size_t>(t.part)];
        if (pd.train.empty()) throw PreconditionError(std::string("no known samples for part ") + part_name(static_cast<Part>(t.part)));
        out.net = train(pd.train, pd.colloc, PhysicsParams::make(c.freq_hz, cfg.speed_of_sound), tc);
      }
    } catch (const Error& e) {
      out.failure = e.what();
    }
  };

  const int jobs = std::max(1, opts.jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t ti = next++; ti < tasks.size(); ti = next++) run_task(ti);
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
  }

  if (opts.checkpoint_dir) std::filesystem::create_directories(*opts.checkpoint_dir);

  // Merge in task order; network rows gather their four part results.
  for (std::size_t ti = 0; ti < tasks.size();) {
    const Task& t = tasks[ti];
    const Case& c = cases[t.case_index];
    ReportRow row;
    row.method = method_name(t.method);
    row.spec = method_spec(cfg, t.method, c.freq_hz);
    row.freq_hz = c.freq_hz;
    row.seed = c.seed;
    if (t.method == Method::sh) {
      const TaskResult& r = results[ti];
      if (r.failure.empty()) {
        fill_metrics(row, c, sh_predict(*r.sh, c.unknown_dirs));
        if (opts.checkpoint_dir) {
          write_file_atomic(*opts.checkpoint_dir / (base_name(t.method, cfg, c) + ".json"),
                            sh_model_to_json(*r.sh).dump(1) + "\n");
        }
      } else {
        row.failure = r.failure;
      }
      ++ti;
    } else {
      std::string failure;
      for (int p = 0; p < 4; ++p)
        if (!results[ti + p].failure.empty() && failure.empty())
          failure = std::string(part_name(static_cast<Part>(p))) + ": " + results[ti + p].failure;
      if (failure.empty()) {
        std::array<MlpParams, 4> nets;
        std::array<std::uint64_t, 4> seeds{};
        std::string log = "part,epoch,data_loss,pde_loss,total_loss\n";
        for (int p = 0; p < 4; ++p) {
          nets[p] = results[ti + p].net->params;
          seeds[p] = network_seed(c.seed, c.freq_hz, p);
          for (const auto& rec : results[ti + p].net->log)
            log += std::string(part_name(static_cast<Part>(p))) + ',' + std::to_string(rec.epoch) + ',' +
                   format_double(rec.data) + ',' + format_double(rec.pde) + ',' +
                   format_double(rec.total) + '\n';
        }
        const QuadrantModel model = assemble(std::move(nets), PhysicsParams::make(c.freq_hz, cfg.speed_of_sound),
                                             c.ds.geometry, c.ds.scale);
        fill_metrics(row, c, predict(model, c.unknown_dirs));
        if (opts.checkpoint_dir) {
          const auto base = *opts.checkpoint_dir / base_name(t.method, cfg, c);
          write_file_atomic(base.string() + ".json",
                            quadrant_to_json(model, seeds, cfg.network.epochs).dump(1) + "\n");
          write_file_atomic(base.string() + ".log.csv", log);
        }
      } else {
        row.failure = failure;
      }
      ti += 4;
    }
    if (row.failed()) row.error_db = std::numeric_limits<double>::quiet_NaN();
    report.rows.push_back(std::move(row));
  }
  report.sort();
  return report;
}

}  // namespace helio
