// SPDX-License-Identifier: Apache-2.0
// Acceptance gate. Usage: acceptance [criterion ...] (default: all of 1-9).
// Prints one PASS/FAIL line per criterion and exits nonzero if any failed.
// Reports of the training criteria are written to ./acceptance_out/.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "helio/dataset.hpp"
#include "helio/experiment.hpp"
#include "helio/mlp.hpp"
#include "helio/pinn.hpp"
#include "helio/report.hpp"
#include "helio/rng.hpp"
#include "helio/sh.hpp"
#include "oracles.hpp"

using namespace helio;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int jobs() {
  if (const char* env = std::getenv("HELIO_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

const std::filesystem::path kOutDir = "acceptance_out";

// ---------------------------------------------------------------------------

Outcome gram_identity() {
  const auto t0 = Clock::now();
  const int U = 10;
  const int n = 4 * (U + 1);
  const auto [x, w] = oracle::gauss_legendre(n);
  std::vector<Direction> dirs;
  std::vector<double> weights;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int j = 0; j < n; ++j) {
      dirs.push_back({std::asin(x[i]) * 180.0 / std::numbers::pi, 360.0 * j / n});
      weights.push_back(w[i] * 2.0 * std::numbers::pi / n);
    }
  const auto Y = sh_matrix(dirs, U);
  const Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  const Eigen::MatrixXcd gram = Y.adjoint() * wv.asDiagonal() * Y;
  const double dev = (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  const double secs = seconds_since(t0);
  return {dev <= 1e-6 && secs < 5.0,
          "U=10 Gram max |G - I| = " + fmt("%.2e", dev) + " (<= 1e-6), " + fmt("%.2f", secs) + " s (< 5)"};
}

Outcome sh_linear_recovery() {
  const auto t0 = Clock::now();
  const auto grid = build_interp_grid();
  const auto ds = normalize(synth_field(synth_coeffs({8, 1, 0.15}), grid, 2067));
  const auto model = sh_fit(ds.pressures(SetTag::known), ds.directions(SetTag::known), {0.0, 8});
  const double db = upsample_error(ds.pressures(SetTag::unknown), sh_predict(model, ds.directions(SetTag::unknown)));
  const double secs = seconds_since(t0);
  return {db < -60.0 && secs < 10.0,
          "order-8 field, 330 known -> 930 unknown, error " + fmt("%.1f", db) + " dB (< -60), " +
              fmt("%.2f", secs) + " s (< 10)"};
}

Outcome sh_extrapolation_collapse() {
  const auto t0 = Clock::now();
  const auto ds = normalize(synth_field(synth_coeffs({29, 1, 0.15}), build_extrap_grid(), 14470));
  const auto model = sh_fit(ds.pressures(SetTag::known), ds.directions(SetTag::known), {1e-3, 29});
  const double db = upsample_error(ds.pressures(SetTag::unknown), sh_predict(model, ds.directions(SetTag::unknown)));
  const double secs = seconds_since(t0);
  return {db >= -3.0 && secs < 30.0,
          "order-29 field, 675 known -> 270 unknown, gamma=1e-3, error " + fmt("%.2f", db) +
              " dB (>= -3), " + fmt("%.2f", secs) + " s (< 30)"};
}

Outcome laplacian_correctness() {
  const auto t0 = Clock::now();
  Rng rng(20240601);
  double worst_lap = 0.0, worst_grad = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int depth = 2 + t % 3;
    const int width = 4 + static_cast<int>(rng.unit() * 12.0);
    MlpParams p = xavier_init({depth, width}, mix_seed(7, static_cast<std::uint64_t>(t)));
    for (auto& l : p.layers) l.biases = l.biases.unaryExpr([&](double) { return rng.uniform(-0.5, 0.5); });
    const Point3 x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};

    const double lap = laplacian(p, x);
    const double fd = oracle::laplacian_fd_extended(p, x, 1e-4);
    worst_lap = std::max(worst_lap, std::abs(lap - fd) / std::abs(fd));

    const auto g = laplacian_param_grad(p, x).flatten();
    auto flat = p.flatten();
    MlpParams q = p;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < flat.size(); ++i) {
      const double keep = flat[i];
      flat[i] = keep + 1e-5;
      q.assign(flat);
      const double up = laplacian(q, x);
      flat[i] = keep - 1e-5;
      q.assign(flat);
      const double down = laplacian(q, x);
      flat[i] = keep;
      const double d = (up - down) / 2e-5;
      num = std::max(num, std::abs(g[i] - d));
      den = std::max(den, std::abs(d));
    }
    worst_grad = std::max(worst_grad, num / den);
  }
  const double secs = seconds_since(t0);
  return {worst_lap <= 1e-5 && worst_grad <= 1e-4 && secs < 60.0,
          "100 nets: Laplacian rel err " + fmt("%.2e", worst_lap) + " (<= 1e-5), parameter gradient rel err " +
              fmt("%.2e", worst_grad) + " (<= 1e-4), " + fmt("%.1f", secs) + " s (< 60)"};
}

Outcome param_counts() {
  const long a = count_params({2, 15}), b = count_params({3, 15}), c = count_params({4, 50});
  std::ostringstream os;
  os << "(2,15)=" << a << " (3,15)=" << b << " (4,50)=" << c << " (expect 316, 556, 7901)";
  return {a == 316 && b == 556 && c == 7901, os.str()};
}

Outcome helmholtz_oracle() {
  double worst = 0.0;
  const auto grid = build_interp_grid();
  for (double f : RunConfig{}.frequencies) {
    const auto ds = synth_field(ShModel::zeros(0), grid, f);
    const auto phys = PhysicsParams::make(f);
    const double k = phys.omega / phys.speed_of_sound;
    const FieldFunction wave = [k](const Point3& p) {
      return FieldSample{std::cos(k * p.x), -k * k * std::cos(k * p.x)};
    };
    worst = std::max(worst, pde_loss(wave, CollocationSet{ds.points()}, phys));
  }
  return {worst < 1e-10, "cos(kx) mean-square residual over 1260 points, worst of 7 frequencies " +
                             fmt("%.2e", worst) + " (< 1e-10)"};
}

// ---------------------------------------------------------------------------
// Desk-scale network experiments

RunConfig desk_config(Scenario s, std::vector<Method> methods) {
  RunConfig cfg;
  cfg.scenario = s;
  cfg.frequencies = {14470};
  cfg.seeds = {1, 2, 3};
  cfg.methods = std::move(methods);
  cfg.synth.order = 29;
  cfg.synth.decay = 0.15;
  cfg.network.depth = 3;
  cfg.network.width = 15;
  cfg.network.epochs = 100000;
  cfg.network.lr = 1e-3;
  cfg.network.log_every = 1000;
  return cfg;
}

std::map<std::pair<std::string, std::uint64_t>, ReportRow> by_method_seed(const ErrorReport& r) {
  std::map<std::pair<std::string, std::uint64_t>, ReportRow> out;
  for (const auto& row : r.rows) out[{row.method, row.seed}] = row;
  return out;
}

std::optional<ErrorReport> interp_report;

ErrorReport run_desk(const RunConfig& cfg, const std::string& tag, double& secs) {
  const auto t0 = Clock::now();
  std::filesystem::create_directories(kOutDir);
  auto report = run_experiment(cfg, {jobs(), kOutDir / (tag + "_checkpoints")});
  secs = seconds_since(t0);
  emit_report(report, kOutDir / (tag + ".csv"));
  write_file_atomic(kOutDir / (tag + ".json"), report_to_json(report).dump(1) + "\n");
  return report;
}

Outcome pinn_vs_nn() {
  double secs = 0.0;
  interp_report = run_desk(desk_config(Scenario::interp, {Method::nn, Method::pinn}), "criterion7", secs);
  const auto rows = by_method_seed(*interp_report);
  if (interp_report->failed_count() > 0)
    return {false, std::to_string(interp_report->failed_count()) + " failed run(s), see acceptance_out/criterion7.json"};

  double pinn_mean = 0.0, nn_peak_ratio = 0.0, pinn_peak_ratio = 0.0;
  bool pinn_wins_all = true;
  std::ostringstream seeds;
  for (std::uint64_t s : {1, 2, 3}) {
    const auto& p = rows.at({"PINN", s});
    const auto& n = rows.at({"NN", s});
    pinn_mean += p.error_db / 3.0;
    pinn_wins_all = pinn_wins_all && p.error_db < n.error_db;
    nn_peak_ratio = std::max(nn_peak_ratio, n.peak_unknown / n.peak_known);
    pinn_peak_ratio = std::max(pinn_peak_ratio, p.peak_unknown / p.peak_known);
    seeds << " seed" << s << " PINN " << fmt("%.2f", p.error_db) << " NN " << fmt("%.2f", n.error_db) << ";";
  }
  const bool a = pinn_mean <= -6.0;
  const bool b = pinn_wins_all;
  const bool c = nn_peak_ratio > 1.5 && pinn_peak_ratio <= 1.2;
  std::ostringstream os;
  os << "(a) PINN mean " << fmt("%.2f", pinn_mean) << " dB <= -6 " << (a ? "ok" : "NO")
     << "; (b) PINN < NN every seed " << (b ? "ok" : "NO") << ";" << seeds.str()
     << " (c) peak ratio NN " << fmt("%.3f", nn_peak_ratio) << " > 1.5, PINN " << fmt("%.3f", pinn_peak_ratio)
     << " <= 1.2 " << (c ? "ok" : "NO") << "; " << fmt("%.0f", secs) << " s";
  return {a && b && c, os.str()};
}

Outcome extrapolation_ordering() {
  double secs = 0.0;
  const auto report =
      run_desk(desk_config(Scenario::extrap, {Method::sh, Method::nn, Method::pinn}), "criterion8", secs);
  if (report.failed_count() > 0)
    return {false, std::to_string(report.failed_count()) + " failed run(s), see acceptance_out/criterion8.json"};
  const auto rows = by_method_seed(report);
  std::map<std::string, double> mean;
  for (const char* m : {"SH", "NN", "PINN"})
    for (std::uint64_t s : {1, 2, 3}) mean[m] += rows.at({m, s}).error_db / 3.0;
  const bool ok = mean["PINN"] <= -3.0 && mean["PINN"] < mean["SH"] && mean["PINN"] < mean["NN"];
  return {ok, "mean extrapolation error PINN " + fmt("%.2f", mean["PINN"]) + " dB (<= -3), SH " +
                  fmt("%.2f", mean["SH"]) + " dB, NN " + fmt("%.2f", mean["NN"]) + " dB (PINN lowest); " +
                  fmt("%.0f", secs) + " s"};
}

Outcome determinism() {
  const auto cfg = desk_config(Scenario::interp, {Method::nn, Method::pinn});
  if (!interp_report) {
    double secs = 0.0;
    interp_report = run_desk(cfg, "criterion7", secs);
  }
  // The repeat uses a different job count to show scheduling does not matter.
  const auto t0 = Clock::now();
  const auto again = run_experiment(cfg, {std::max(1, jobs() / 2 + 1), std::nullopt});
  const double secs = seconds_since(t0);
  emit_report(again, kOutDir / "criterion9.csv");
  const bool same = read_file(kOutDir / "criterion7.csv") == read_file(kOutDir / "criterion9.csv");
  return {same, std::string("repeated criterion 7 report CSV is ") + (same ? "bitwise identical" : "DIFFERENT") +
                    "; " + fmt("%.0f", secs) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Outcome()>>> all{
      {1, gram_identity},         {2, sh_linear_recovery}, {3, sh_extrapolation_collapse},
      {4, laplacian_correctness}, {5, param_counts},       {6, helmholtz_oracle},
      {7, pinn_vs_nn},            {8, extrapolation_ordering}, {9, determinism}};

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int c = std::atoi(argv[i]);
    if (c < 1 || c > 9) {
      std::fprintf(stderr, "usage: %s [criterion 1-9 ...]\n", argv[0]);
      return 2;
    }
    selected.push_back(c);
  }
  if (selected.empty())
    for (const auto& [n, fn] : all) selected.push_back(n);

  int failed = 0;
  for (const auto& [n, fn] : all) {
    if (std::find(selected.begin(), selected.end(), n) == selected.end()) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
