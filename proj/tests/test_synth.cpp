// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "helio/dataset.hpp"
#include "helio/error.hpp"
#include "helio/report.hpp"
#include "helio/rng.hpp"
#include "oracles.hpp"

using namespace helio;
using doctest::Approx;

TEST_CASE("synth_coeffs bounds and determinism") {
  const auto a = synth_coeffs({0, 1, 1.0});
  CHECK(a.coeffs.size() == 1);
  CHECK(std::abs(a.coeffs(0).real()) <= 1.0);
  CHECK(std::abs(a.coeffs(0).imag()) <= 1.0);

  const auto b = synth_coeffs({12, 42, 0.15});
  const auto c = synth_coeffs({12, 42, 0.15});
  CHECK(b.coeffs == c.coeffs);
  CHECK(synth_coeffs({12, 43, 0.15}).coeffs != b.coeffs);

  CHECK_THROWS_AS(synth_coeffs({-1, 1, 0.1}), DomainError);
  CHECK_THROWS_AS(synth_coeffs({2, 1, 0.0}), DomainError);
}

TEST_CASE("synth_coeffs decay profile matches the seeded stream") {
  const SynthSpec spec{5, 7, 2.0};
  const auto m = synth_coeffs(spec);
  // Replay the stream: re then im for each (u, v) in index order.
  Rng rng(spec.seed);
  for (int u = 0; u <= spec.order; ++u)
    for (int v = -u; v <= u; ++v) {
      const double re = rng.uniform(-1, 1);
      const double im = rng.uniform(-1, 1);
      const double amp = std::exp(-spec.decay * u);
      CHECK(m.at(u, v).real() == Approx(amp * re).epsilon(1e-15));
      CHECK(m.at(u, v).imag() == Approx(amp * im).epsilon(1e-15));
      CHECK(std::abs(m.at(u, v).real()) <= amp);
      CHECK(std::abs(m.at(u, v).imag()) <= amp);
    }
  double top = 0.0;
  for (int v = -5; v <= 5; ++v) top = std::max(top, std::abs(m.at(5, v)));
  CHECK(top <= std::sqrt(2.0) * std::exp(-10.0));
}

TEST_CASE("synth_field special models") {
  const auto grid = build_interp_grid();
  auto m = ShModel::zeros(0);
  m.at(0, 0) = 1.0;
  const auto ds = synth_field(m, grid, 2067);
  CHECK(ds.entries.size() == 1260);
  CHECK(ds.count(SetTag::known) == 330);
  for (const auto& e : ds.entries) CHECK(e.pressure.real() == Approx(0.28209479177));

  const auto zero = synth_field(ShModel::zeros(3), grid, 2067);
  for (const auto& e : zero.entries) CHECK(e.pressure == cdouble{});
}

TEST_CASE("synth_field matches a term-by-term summation") {
  const auto m = synth_coeffs({4, 21, 0.15});
  GridSplit g;
  for (int i = 0; i < 10; ++i) g.known.push_back({-80.0 + 17.0 * i, 3.0 + 35.0 * i});
  const auto ds = synth_field(m, g, 8269);
  CHECK(ds.geometry.radius_m == 0.09);
  for (std::size_t i = 0; i < g.known.size(); ++i) {
    cdouble sum{};
    for (int u = 0; u <= 4; ++u)
      for (int v = -u; v <= u; ++v)
        sum += m.at(u, v) * oracle::sh_explicit(u, v, g.known[i].theta_deg, g.known[i].phi_deg);
    CHECK(std::abs(ds.entries[i].pressure - sum) < 1e-12);
    const auto p = sph_to_cart(g.known[i], 0.09);
    CHECK(ds.entries[i].point == p);
  }
}

TEST_CASE("normalize") {
  FieldDataset ds;
  ds.freq_hz = 1000;
  ds.entries = {{{0, 4}, {}, {4.0, 0.0}, SetTag::known},
                {{0, 10}, {}, {0.0, 2.0}, SetTag::unknown},
                {{0, 16}, {}, {-1.0, 1.0}, SetTag::unknown}};
  const auto n = normalize(ds);
  CHECK(n.scale == 4.0);
  CHECK(std::abs(n.entries[0].pressure) == 1.0);
  CHECK(n.entries[1].pressure == cdouble{0.0, 0.5});

  const auto nn = normalize(n);
  CHECK(nn.scale == 1.0);
  for (std::size_t i = 0; i < n.entries.size(); ++i) CHECK(nn.entries[i].pressure == n.entries[i].pressure);

  FieldDataset zero = ds;
  for (auto& e : zero.entries) e.pressure = 0.0;
  zero.scale = 7.0;
  const auto z = normalize(zero);
  CHECK(z.scale == 1.0);
  for (const auto& e : z.entries) CHECK(e.pressure == cdouble{});
}

TEST_CASE("normalization is idempotent on synthetic fields") {
  const auto ds = normalize(synth_field(synth_coeffs({9, 5, 0.15}), build_interp_grid(), 2067));
  double peak = 0.0;
  for (const auto& e : ds.entries) peak = std::max(peak, std::abs(e.pressure));
  CHECK(peak == Approx(1.0).epsilon(1e-15));
  const auto again = normalize(ds);
  for (std::size_t i = 0; i < ds.entries.size(); ++i)
    CHECK(std::abs(again.entries[i].pressure - ds.entries[i].pressure) <= 1e-15);
}

TEST_CASE("joint normalization leaves the error metric unchanged") {
  const auto raw = synth_field(synth_coeffs({9, 5, 0.15}), build_interp_grid(), 2067);
  const auto truth = raw.pressures(SetTag::unknown);
  std::vector<cdouble> est = truth;
  for (std::size_t i = 0; i < est.size(); ++i) est[i] *= (i % 3 == 0) ? 1.1 : 0.95;
  const double before = upsample_error(truth, est);
  const auto norm = normalize(raw);
  std::vector<cdouble> est_n = est;
  for (auto& v : est_n) v /= norm.scale;
  CHECK(upsample_error(norm.pressures(SetTag::unknown), est_n) == Approx(before).epsilon(1e-12));
}

TEST_CASE("dataset CSV round-trip") {
  const auto ds = normalize(synth_field(synth_coeffs({12, 2, 0.15}), build_extrap_grid(), 14470));
  const auto csv = dataset_to_csv(ds);
  CHECK(csv.rfind("freq_hz,theta_deg,phi_deg,x,y,z,re,im,set\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 946);
  const auto back = dataset_from_csv(csv);
  CHECK(back.freq_hz == ds.freq_hz);
  CHECK(back.geometry.radius_m == Approx(0.09).epsilon(1e-12));
  REQUIRE(back.entries.size() == ds.entries.size());
  for (std::size_t i = 0; i < ds.entries.size(); ++i) {
    CHECK(back.entries[i].dir == ds.entries[i].dir);
    CHECK(back.entries[i].point == ds.entries[i].point);
    CHECK(back.entries[i].pressure == ds.entries[i].pressure);
    CHECK(back.entries[i].tag == ds.entries[i].tag);
  }
  CHECK(dataset_to_csv(back) == csv);
}

TEST_CASE("dataset CSV rejects malformed input") {
  CHECK_THROWS_AS(dataset_from_csv("a,b\n1,2\n"), ConfigError);
  const std::string header = "freq_hz,theta_deg,phi_deg,x,y,z,re,im,set\n";
  CHECK_THROWS_AS(dataset_from_csv(header + "1000,0,4,0.2,0,0,1,0,maybe\n"), ConfigError);
  CHECK_THROWS_AS(dataset_from_csv(header + "1000,0,4,0.2,0,0,1,0,known\n2000,0,10,0.2,0,0,1,0,known\n"),
                  ConfigError);
  CHECK_THROWS_AS(dataset_from_csv(header + "1000,0,4,0.2,0,0,abc,0,known\n"), ConfigError);
  CHECK_THROWS_AS(read_dataset_csv("/nonexistent/dir/file.csv"), IoError);
}

TEST_CASE("atomic writes leave no temporary file") {
  const auto dir = std::filesystem::temp_directory_path() / "helio_test_atomic";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = dir / "x.txt";
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  CHECK(read_file(path) == "second\n");
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  CHECK_THROWS_AS(write_file_atomic(dir / "missing" / "y.txt", "z"), IoError);
  std::filesystem::remove_all(dir);
}
