// SPDX-License-Identifier: Apache-2.0
#include "helio/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "helio/error.hpp"
#include "helio/format.hpp"
#include "helio/rng.hpp"

namespace helio {

std::vector<Direction> FieldDataset::directions(SetTag tag) const {
  std::vector<Direction> out;
  for (const auto& e : entries)
    if (e.tag == tag) out.push_back(e.dir);
  return out;
}

std::vector<cdouble> FieldDataset::pressures(SetTag tag) const {
  std::vector<cdouble> out;
  for (const auto& e : entries)
    if (e.tag == tag) out.push_back(e.pressure);
  return out;
}

std::vector<Point3> FieldDataset::points() const {
  std::vector<Point3> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.point);
  return out;
}

std::size_t FieldDataset::count(SetTag tag) const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.tag == tag;
  return n;
}

ShModel synth_coeffs(const SynthSpec& spec) {
  if (spec.order < 0) throw DomainError("synthetic order must be nonnegative");
  if (!(spec.decay > 0.0)) throw DomainError("synthetic decay must be positive");
  ShModel m = ShModel::zeros(spec.order);
  Rng rng(spec.seed);
  for (int u = 0; u <= spec.order; ++u) {
    const double amp = std::exp(-spec.decay * u);
    for (int v = -u; v <= u; ++v) {
      const double re = rng.uniform(-1.0, 1.0);
      const double im = rng.uniform(-1.0, 1.0);
      m.at(u, v) = amp * cdouble(re, im);
    }
  }
  return m;
}

FieldDataset synth_field(const ShModel& model, const GridSplit& grid, double freq_hz) {
  FieldDataset ds;
  ds.freq_hz = freq_hz;
  ds.geometry = SphereGeometry::for_frequency(freq_hz);
  auto add = [&](const std::vector<Direction>& dirs, SetTag tag) {
    if (dirs.empty()) return;
    const auto p = sh_predict(model, dirs);
    for (std::size_t i = 0; i < dirs.size(); ++i)
      ds.entries.push_back({dirs[i], sph_to_cart(dirs[i], ds.geometry.radius_m), p[i], tag});
  };
  add(grid.known, SetTag::known);
  add(grid.unknown, SetTag::unknown);
  return ds;
}

FieldDataset normalize(FieldDataset ds) {
  double peak = 0.0;
  for (const auto& e : ds.entries) peak = std::max(peak, std::abs(e.pressure));
  if (peak == 0.0) {
    ds.scale = 1.0;
    return ds;
  }
  for (auto& e : ds.entries) e.pressure /= peak;
  ds.scale = peak;
  return ds;
}

std::string dataset_to_csv(const FieldDataset& ds) {
  std::string out = "freq_hz,theta_deg,phi_deg,x,y,z,re,im,set\n";
  for (const auto& e : ds.entries) {
    out += format_double(ds.freq_hz) + ',' + format_double(e.dir.theta_deg) + ',' +
           format_double(e.dir.phi_deg) + ',' + format_double(e.point.x) + ',' +
           format_double(e.point.y) + ',' + format_double(e.point.z) + ',' +
           format_double(e.pressure.real()) + ',' + format_double(e.pressure.imag()) + ',' +
           (e.tag == SetTag::known ? "known" : "unknown") + '\n';
  }
  return out;
}

FieldDataset dataset_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "freq_hz,theta_deg,phi_deg,x,y,z,re,im,set")
    throw ConfigError("dataset CSV must start with header freq_hz,theta_deg,phi_deg,x,y,z,re,im,set");
  FieldDataset ds;
  bool first = true;
  double radius_sum = 0.0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv(trim(line));
    if (f.size() != 9)
      throw ConfigError("dataset CSV line " + std::to_string(lineno) + ": expected 9 fields");
    try {
      const double freq = parse_double(f[0]);
      if (first) {
        ds.freq_hz = freq;
        first = false;
      } else if (freq != ds.freq_hz) {
        throw ConfigError("dataset CSV line " + std::to_string(lineno) +
                          ": mixed frequencies in one dataset");
      }
      FieldEntry e;
      e.dir = Direction::checked(parse_double(f[1]), parse_double(f[2]));
      e.point = {parse_double(f[3]), parse_double(f[4]), parse_double(f[5])};
      e.pressure = {parse_double(f[6]), parse_double(f[7])};
      if (f[8] == "known")
        e.tag = SetTag::known;
      else if (f[8] == "unknown")
        e.tag = SetTag::unknown;
      else
        throw ConfigError("set must be known or unknown");
      radius_sum += std::sqrt(e.point.x * e.point.x + e.point.y * e.point.y + e.point.z * e.point.z);
      ds.entries.push_back(e);
    } catch (const Error& err) {
      throw ConfigError("dataset CSV line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  if (ds.entries.empty()) throw ConfigError("dataset CSV has no rows");
  if (!(ds.freq_hz > 0.0)) throw ConfigError("dataset frequency must be positive");
  ds.geometry.radius_m = radius_sum / static_cast<double>(ds.entries.size());
  if (!(ds.geometry.radius_m > 0.0)) throw ConfigError("dataset points lie at the origin");
  return ds;
}

void write_dataset_csv(const FieldDataset& ds, const std::filesystem::path& path) {
  write_file_atomic(path, dataset_to_csv(ds));
}

FieldDataset read_dataset_csv(const std::filesystem::path& path) {
  return dataset_from_csv(read_file(path));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace helio
