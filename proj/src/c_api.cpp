// SPDX-License-Identifier: Apache-2.0
#include "helio/helio.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "helio/dataset.hpp"
#include "helio/error.hpp"
#include "helio/experiment.hpp"
#include "helio/pinn.hpp"
#include "helio/report.hpp"
#include "helio/rng.hpp"

struct helio_dataset {
  helio::FieldDataset ds;
};
struct helio_sh_model {
  helio::ShModel model;
};
struct helio_quadrant {
  helio::QuadrantModel model;
  std::array<std::uint64_t, 4> seeds{};
  long epochs = 0;
};
struct helio_report {
  helio::ErrorReport report;
};

namespace {

thread_local std::string g_last_error;

helio_status to_status(helio::Status s) { return static_cast<helio_status>(static_cast<int>(s)); }

template <typename F>
helio_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return HELIO_OK;
  } catch (const helio::Error& e) {
    g_last_error = e.what();
    return to_status(e.status());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("JSON: ") + e.what();
    return HELIO_ERR_CONFIG;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return HELIO_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HELIO_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HELIO_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw helio::PreconditionError(what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

helio::RunConfig parse_config(const char* config_json) {
  require(config_json != nullptr, "config JSON is null");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::exception& e) {
    throw helio::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return helio::run_config_from_json(j);
}

double error_on_unknown(const helio::FieldDataset& ds, const std::vector<helio::cdouble>& est) {
  return helio::upsample_error(ds.pressures(helio::SetTag::unknown), est);
}

}  // namespace

extern "C" {

const char* helio_version(void) { return "0.1.0"; }

const char* helio_last_error(void) { return g_last_error.c_str(); }

void helio_string_free(char* s) { std::free(s); }

helio_train_options helio_train_options_default(void) {
  helio_train_options o;
  o.depth = 3;
  o.width = 0;
  o.epochs = 100000;
  o.learning_rate = 1e-3;
  o.pde_loss = 1;
  o.seed = 0;
  o.speed_of_sound = 343.0;
  o.jobs = 1;
  return o;
}

helio_status helio_grid_csv(const char* scenario, char** out_csv) {
  return guarded([&] {
    require(scenario != nullptr && out_csv != nullptr, "null argument");
    *out_csv = dup_string(helio::grid_to_csv(helio::build_grid(helio::parse_scenario(scenario))));
  });
}

helio_status helio_sh_order_for_freq(double freq_hz, int* out_order) {
  return guarded([&] {
    require(out_order != nullptr, "null argument");
    *out_order = helio::sh_order_for_freq(freq_hz);
  });
}

helio_status helio_width_for_freq(double freq_hz, int* out_width) {
  return guarded([&] {
    require(out_width != nullptr, "null argument");
    *out_width = helio::pinn_width_for_freq(freq_hz);
  });
}

helio_status helio_count_params(int depth, int width, long* out_count) {
  return guarded([&] {
    require(out_count != nullptr, "null argument");
    require(depth >= 1 && width >= 1, "depth and width must be at least 1");
    *out_count = helio::count_params({depth, width});
  });
}

helio_status helio_dataset_synth(const char* scenario, int order, uint64_t seed, double decay,
                                 double freq_hz, helio_dataset** out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    const int u = order < 0 ? helio::sh_order_for_freq(freq_hz) : order;
    const auto truth = helio::synth_coeffs({u, seed, decay});
    auto ds = helio::normalize(
        helio::synth_field(truth, helio::build_grid(helio::parse_scenario(scenario)), freq_hz));
    *out = new helio_dataset{std::move(ds)};
  });
}

helio_status helio_dataset_read_csv(const char* path, helio_dataset** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new helio_dataset{helio::read_dataset_csv(path)};
  });
}

helio_status helio_dataset_write_csv(const helio_dataset* ds, const char* path) {
  return guarded([&] {
    require(ds != nullptr && path != nullptr, "null argument");
    helio::write_dataset_csv(ds->ds, path);
  });
}

size_t helio_dataset_count(const helio_dataset* ds, helio_set set) {
  if (ds == nullptr) return 0;
  if (set == HELIO_SET_ALL) return ds->ds.entries.size();
  return ds->ds.count(set == HELIO_SET_KNOWN ? helio::SetTag::known : helio::SetTag::unknown);
}

double helio_dataset_freq(const helio_dataset* ds) { return ds == nullptr ? 0.0 : ds->ds.freq_hz; }

double helio_dataset_scale(const helio_dataset* ds) { return ds == nullptr ? 0.0 : ds->ds.scale; }

void helio_dataset_free(helio_dataset* ds) { delete ds; }

helio_status helio_sh_fit(const helio_dataset* ds, int order, double gamma, helio_sh_model** out) {
  return guarded([&] {
    require(ds != nullptr && out != nullptr, "null argument");
    const int u = order < 0 ? helio::sh_order_for_freq(ds->ds.freq_hz) : order;
    auto model = helio::sh_fit(ds->ds.pressures(helio::SetTag::known),
                               ds->ds.directions(helio::SetTag::known), {gamma, u});
    *out = new helio_sh_model{std::move(model)};
  });
}

helio_status helio_sh_model_json(const helio_sh_model* model, char** out_json) {
  return guarded([&] {
    require(model != nullptr && out_json != nullptr, "null argument");
    *out_json = dup_string(helio::sh_model_to_json(model->model).dump());
  });
}

helio_status helio_sh_error_db(const helio_sh_model* model, const helio_dataset* ds, double* out_db) {
  return guarded([&] {
    require(model != nullptr && ds != nullptr && out_db != nullptr, "null argument");
    *out_db = error_on_unknown(ds->ds, helio::sh_predict(model->model, ds->ds.directions(helio::SetTag::unknown)));
  });
}

void helio_sh_model_free(helio_sh_model* model) { delete model; }

helio_status helio_train_quadrant(const helio_dataset* ds, const helio_train_options* opts,
                                  helio_quadrant** out) {
  return guarded([&] {
    require(ds != nullptr && opts != nullptr && out != nullptr, "null argument");
    helio::TrainConfig cfg;
    cfg.spec = {opts->depth, opts->width > 0 ? opts->width : helio::pinn_width_for_freq(ds->ds.freq_hz)};
    cfg.epochs = opts->epochs;
    cfg.lr = opts->learning_rate;
    cfg.pde_loss_enabled = opts->pde_loss != 0;
    cfg.log_every = 0;
    std::array<std::uint64_t, 4> seeds{};
    for (int p = 0; p < 4; ++p) seeds[static_cast<std::size_t>(p)] = helio::mix_seed(opts->seed, static_cast<std::uint64_t>(p));
    auto model = helio::train_quadrant(ds->ds, cfg, seeds, opts->speed_of_sound, opts->jobs);
    *out = new helio_quadrant{std::move(model), seeds, opts->epochs};
  });
}

helio_status helio_quadrant_json(const helio_quadrant* model, char** out_json) {
  return guarded([&] {
    require(model != nullptr && out_json != nullptr, "null argument");
    *out_json = dup_string(helio::quadrant_to_json(model->model, model->seeds, model->epochs).dump());
  });
}

helio_status helio_quadrant_from_json(const char* json, helio_quadrant** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "null argument");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      throw helio::ConfigError(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    auto* q = new helio_quadrant{helio::quadrant_from_json(j), {}, 0};
    for (helio::Part p : helio::all_parts) {
      const auto& part = j.at("parts").at(helio::part_name(p));
      q->seeds[static_cast<std::size_t>(p)] = part.value("seed", std::uint64_t{0});
      q->epochs = part.value("epoch", 0L);
    }
    *out = q;
  });
}

helio_status helio_quadrant_error_db(const helio_quadrant* model, const helio_dataset* ds, double* out_db) {
  return guarded([&] {
    require(model != nullptr && ds != nullptr && out_db != nullptr, "null argument");
    *out_db = error_on_unknown(ds->ds, helio::predict(model->model, ds->ds.directions(helio::SetTag::unknown)));
  });
}

helio_status helio_quadrant_predict(const helio_quadrant* model, size_t n, const double* theta_deg,
                                    const double* phi_deg, double* out_re, double* out_im) {
  return guarded([&] {
    require(model != nullptr, "null model");
    if (n == 0) return;
    require(theta_deg != nullptr && phi_deg != nullptr && out_re != nullptr && out_im != nullptr,
            "null array");
    std::vector<helio::Direction> dirs;
    dirs.reserve(n);
    for (size_t i = 0; i < n; ++i) dirs.push_back(helio::Direction::checked(theta_deg[i], phi_deg[i]));
    const auto est = helio::predict(model->model, dirs);
    for (size_t i = 0; i < n; ++i) {
      out_re[i] = est[i].real();
      out_im[i] = est[i].imag();
    }
  });
}

void helio_quadrant_free(helio_quadrant* model) { delete model; }

helio_status helio_upsample_error_db(size_t n, const double* truth_re, const double* truth_im,
                                     const double* est_re, const double* est_im, double* out_db) {
  return guarded([&] {
    require(out_db != nullptr, "null output");
    require(n > 0 && truth_re && truth_im && est_re && est_im, "empty or null arrays");
    std::vector<helio::cdouble> t(n), e(n);
    for (size_t i = 0; i < n; ++i) {
      t[i] = {truth_re[i], truth_im[i]};
      e[i] = {est_re[i], est_im[i]};
    }
    *out_db = helio::upsample_error(t, e);
  });
}

helio_status helio_config_defaults(char** out_json) {
  return guarded([&] {
    require(out_json != nullptr, "null argument");
    *out_json = dup_string(helio::run_config_to_json(helio::RunConfig{}).dump(2) + "\n");
  });
}

helio_status helio_config_resolve(const char* config_json, char** out_json) {
  return guarded([&] {
    require(out_json != nullptr, "null argument");
    *out_json = dup_string(helio::run_config_to_json(parse_config(config_json)).dump(2) + "\n");
  });
}

helio_status helio_plan(const char* config_json, char** out_text) {
  return guarded([&] {
    require(out_text != nullptr, "null argument");
    const auto cfg = parse_config(config_json);
    std::ostringstream os;
    os << "scenario " << helio::scenario_name(cfg.scenario) << '\n';
    for (const auto& j : helio::plan_jobs(cfg)) {
      os << j.method << ' ' << j.spec << " freq_hz=" << j.freq_hz << " seed=" << j.seed;
      if (!j.part.empty()) os << " part=" << j.part;
      os << '\n';
    }
    *out_text = dup_string(os.str());
  });
}

helio_status helio_synth_datasets(const char* config_json, const char* out_dir, char** out_paths) {
  return guarded([&] {
    require(out_dir != nullptr && out_paths != nullptr, "null argument");
    const auto cfg = parse_config(config_json);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw helio::IoError(std::string("cannot create ") + out_dir + ": " + ec.message());
    std::string paths;
    for (std::uint64_t seed : cfg.seeds)
      for (double f : cfg.frequencies) {
        const auto path = std::filesystem::path(out_dir) / helio::dataset_file_name(cfg.scenario, seed, f);
        helio::write_dataset_csv(helio::make_dataset(cfg, seed, f), path);
        paths += path.string() + '\n';
      }
    *out_paths = dup_string(paths);
  });
}

helio_status helio_run(const char* config_json, int jobs, const char* checkpoint_dir, helio_report** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const auto cfg = parse_config(config_json);
    helio::ExperimentOptions opts;
    opts.jobs = jobs;
    if (checkpoint_dir != nullptr) opts.checkpoint_dir = std::filesystem::path(checkpoint_dir);
    *out = new helio_report{helio::run_experiment(cfg, opts)};
  });
}

helio_status helio_report_read_csv(const char* path, helio_report** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new helio_report{helio::read_report(path)};
  });
}

helio_status helio_report_write_csv(const helio_report* report, const char* path) {
  return guarded([&] {
    require(report != nullptr && path != nullptr, "null argument");
    helio::emit_report(report->report, path);
  });
}

helio_status helio_report_write_json(const helio_report* report, const char* path) {
  return guarded([&] {
    require(report != nullptr && path != nullptr, "null argument");
    helio::write_file_atomic(path, helio::report_to_json(report->report).dump(1) + "\n");
  });
}

size_t helio_report_rows(const helio_report* report) {
  return report == nullptr ? 0 : report->report.rows.size();
}

size_t helio_report_failed_rows(const helio_report* report) {
  return report == nullptr ? 0 : report->report.failed_count();
}

helio_status helio_report_failures(const helio_report* report, char** out_text) {
  return guarded([&] {
    require(report != nullptr && out_text != nullptr, "null argument");
    std::ostringstream os;
    for (const auto& r : report->report.rows)
      if (r.failed())
        os << r.method << ' ' << r.spec << " freq_hz=" << r.freq_hz << " seed=" << r.seed << ": "
           << r.failure << '\n';
    *out_text = dup_string(os.str());
  });
}

helio_status helio_report_compare(const helio_report* a, const helio_report* b, const char* method_a,
                                  const char* method_b, char** out_text) {
  return guarded([&] {
    require(a != nullptr && b != nullptr && out_text != nullptr, "null argument");
    std::optional<std::string> ma, mb;
    if (method_a != nullptr) ma = method_a;
    if (method_b != nullptr) mb = method_b;
    *out_text = dup_string(helio::comparison_to_text(helio::compare_reports(a->report, b->report, ma, mb)));
  });
}

void helio_report_free(helio_report* report) { delete report; }

}  // extern "C"
