// SPDX-License-Identifier: Apache-2.0
// helio-cli: batch front end over the C API.
//
// Exit codes: 0 success, 2 config or usage, 3 I/O, 4 numerical failure
// (including runs that finished with failed rows).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "helio/helio.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

int exit_code(helio_status s) {
  switch (s) {
    case HELIO_OK: return kExitOk;
    case HELIO_ERR_ARGUMENT:
    case HELIO_ERR_CONFIG: return kExitConfig;
    case HELIO_ERR_IO: return kExitIo;
    case HELIO_ERR_NUMERIC:
    case HELIO_ERR_INTERNAL: return kExitNumeric;
  }
  return kExitNumeric;
}

/// Thrown to unwind with a specific exit code after printing a message.
struct Exit {
  int code;
};

void check(helio_status s, const char* what) {
  if (s == HELIO_OK) return;
  std::cerr << "helio: " << what << ": " << helio_last_error() << '\n';
  throw Exit{exit_code(s)};
}

struct StringDeleter {
  void operator()(char* s) const { helio_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct ReportDeleter {
  void operator()(helio_report* r) const { helio_report_free(r); }
};
using OwnedReport = std::unique_ptr<helio_report, ReportDeleter>;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "helio: cannot read " << path << '\n';
    throw Exit{kExitIo};
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

/// Config JSON with command-line overrides applied; validated by the library.
std::string load_config(const CommonFlags& flags) {
  nlohmann::json j = nlohmann::json::object();
  if (!flags.config_path.empty()) {
    try {
      j = nlohmann::json::parse(read_text(flags.config_path));
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "helio: " << flags.config_path << " is not valid JSON: " << e.what() << '\n';
      throw Exit{kExitConfig};
    }
  }
  if (!j.is_object()) {
    std::cerr << "helio: config must be a JSON object\n";
    throw Exit{kExitConfig};
  }
  if (flags.seed) j["seeds"] = nlohmann::json::array({*flags.seed});
  if (flags.out_dir) j["output"]["dir"] = *flags.out_dir;
  char* resolved = nullptr;
  check(helio_config_resolve(j.dump().c_str(), &resolved), "invalid config");
  OwnedString owned(resolved);
  return resolved;
}

int jobs_from(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("HELIO_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<int>(v);
    std::cerr << "helio: ignoring invalid HELIO_JOBS=" << env << '\n';
  }
  return 1;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "helio: cannot create " << dir.string() << ": " << ec.message() << '\n';
    throw Exit{kExitIo};
  }
}

int cmd_defaults() {
  char* text = nullptr;
  check(helio_config_defaults(&text), "defaults");
  OwnedString owned(text);
  std::cout << text;
  return kExitOk;
}

int cmd_plan(const std::string& config) {
  char* text = nullptr;
  check(helio_plan(config.c_str(), &text), "plan");
  OwnedString owned(text);
  std::cout << text;
  return kExitOk;
}

int cmd_synth(const CommonFlags& flags, bool dry_run) {
  const auto config = load_config(flags);
  const auto out = nlohmann::json::parse(config).at("output").at("dir").get<std::string>();
  if (dry_run) {
    std::cout << "would write datasets to " << out << '\n';
    return kExitOk;
  }
  char* paths = nullptr;
  check(helio_synth_datasets(config.c_str(), out.c_str(), &paths), "synth");
  OwnedString owned(paths);
  std::cout << paths;
  return kExitOk;
}

int cmd_run(const CommonFlags& flags, int jobs_flag, bool dry_run) {
  const auto config = load_config(flags);
  if (dry_run) return cmd_plan(config);
  const auto resolved = nlohmann::json::parse(config);
  const std::filesystem::path out = resolved.at("output").at("dir").get<std::string>();
  ensure_dir(out);
  const bool checkpoints = resolved.at("output").at("checkpoints").get<bool>();
  const auto ckpt = (out / "checkpoints").string();

  helio_report* raw = nullptr;
  check(helio_run(config.c_str(), jobs_from(jobs_flag), checkpoints ? ckpt.c_str() : nullptr, &raw),
        "run");
  OwnedReport report(raw);
  check(helio_report_write_csv(report.get(), (out / "report.csv").string().c_str()), "writing report");
  check(helio_report_write_json(report.get(), (out / "report.json").string().c_str()),
        "writing report");
  std::cout << "wrote " << helio_report_rows(report.get()) << " rows to " << (out / "report.csv").string()
            << '\n';

  const std::size_t failed = helio_report_failed_rows(report.get());
  if (failed == 0) return kExitOk;
  char* text = nullptr;
  check(helio_report_failures(report.get(), &text), "failure summary");
  OwnedString owned(text);
  std::cerr << "helio: " << failed << " run(s) failed\n" << text;
  return kExitNumeric;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::string& method_a,
                const std::string& method_b) {
  helio_report* a = nullptr;
  check(helio_report_read_csv(a_path.c_str(), &a), "reading first report");
  OwnedReport ra(a);
  helio_report* b = nullptr;
  check(helio_report_read_csv(b_path.c_str(), &b), "reading second report");
  OwnedReport rb(b);
  char* text = nullptr;
  check(helio_report_compare(a, b, method_a.empty() ? nullptr : method_a.c_str(),
                             method_b.empty() ? nullptr : method_b.c_str(), &text),
        "compare");
  OwnedString owned(text);
  std::cout << text;
  return kExitOk;
}

int cmd_grid(const std::string& scenario) {
  char* text = nullptr;
  check(helio_grid_csv(scenario.c_str(), &text), "grid");
  OwnedString owned(text);
  std::cout << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sound-field upsampling experiments (SH, NN, PINN)", "helio-cli"};
  app.set_version_flag("--version", helio_version());
  app.require_subcommand(1);

  CommonFlags flags;
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 0;
  bool dry_run = false;

  auto add_config_flags = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "Config JSON (defaults when omitted)");
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "Run a single seed (overrides seeds)");
    sub->add_flag("--dry-run", dry_run, "Print what would be done and write nothing");
  };

  auto* defaults = app.add_subcommand("defaults", "Print the default config");
  auto* synth = app.add_subcommand("synth", "Write one normalized dataset CSV per (seed, frequency)");
  add_config_flags(synth);
  auto* run = app.add_subcommand("run", "Fit, train and evaluate; writes report.csv and report.json");
  add_config_flags(run);
  run->add_option("--jobs", jobs, "Parallel trainings (falls back to HELIO_JOBS)")->check(CLI::Range(1, 1024));

  std::string report_a, report_b, method_a, method_b;
  auto* compare = app.add_subcommand("compare", "Per-key error deltas of two reports (a - b)");
  compare->add_option("report_a", report_a)->required();
  compare->add_option("report_b", report_b)->required();
  compare->add_option("--method-a", method_a, "Rows of report_a to use");
  compare->add_option("--method-b", method_b, "Rows of report_b to use");

  std::string scenario = "interp";
  auto* grid = app.add_subcommand("grid", "Print a measurement grid");
  grid->add_option("scenario", scenario, "interp or extrap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  for (auto* sub : {synth, run}) {
    if (!sub->parsed()) continue;
    if (sub->count("--out") > 0) flags.out_dir = out_dir;
    if (sub->count("--seed") > 0) flags.seed = seed;
  }

  try {
    if (defaults->parsed()) return cmd_defaults();
    if (synth->parsed()) return cmd_synth(flags, dry_run);
    if (run->parsed()) return cmd_run(flags, jobs, dry_run);
    if (compare->parsed()) return cmd_compare(report_a, report_b, method_a, method_b);
    if (grid->parsed()) return cmd_grid(scenario);
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitConfig;
}
