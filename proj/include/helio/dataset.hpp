// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "helio/geometry.hpp"
#include "helio/sh.hpp"

namespace helio {

enum class SetTag { known, unknown };

struct FieldEntry {
  Direction dir;
  Point3 point;
  cdouble pressure;
  SetTag tag = SetTag::known;
};

/// Complex pressures on one evaluation sphere at one frequency.
struct FieldDataset {
  double freq_hz = 0.0;
  SphereGeometry geometry;
  std::vector<FieldEntry> entries;
  double scale = 1.0;  ///< divisor applied by normalize()

  std::vector<Direction> directions(SetTag tag) const;
  std::vector<cdouble> pressures(SetTag tag) const;
  std::vector<Point3> points() const;
  std::size_t count(SetTag tag) const;
};

/// Generator parameters for a band-limited random field.
struct SynthSpec {
  int order = 0;
  std::uint64_t seed = 0;
  double decay = 0.15;  ///< amplitude falloff exp(-decay * u)
};

/// Real and imaginary parts uniform in [-1, 1], scaled by exp(-decay * u).
ShModel synth_coeffs(const SynthSpec& spec);

/// Evaluates the SH series at every grid direction on the sphere whose radius
/// follows from freq_hz. Not normalized.
FieldDataset synth_field(const ShModel& model, const GridSplit& grid, double freq_hz);

/// Divides every pressure by the largest magnitude (known and unknown
/// together) and records it in scale. An all-zero field passes through.
FieldDataset normalize(FieldDataset ds);

/// CSV header: freq_hz,theta_deg,phi_deg,x,y,z,re,im,set
std::string dataset_to_csv(const FieldDataset& ds);
FieldDataset dataset_from_csv(const std::string& text);

void write_dataset_csv(const FieldDataset& ds, const std::filesystem::path& path);
FieldDataset read_dataset_csv(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace helio
