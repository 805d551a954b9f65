// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "helio/dataset.hpp"
#include "helio/mlp.hpp"

namespace helio {

struct PhysicsParams {
  double freq_hz = 1000.0;
  double omega = 0.0;          ///< 2 pi f
  double speed_of_sound = 343.0;

  static PhysicsParams make(double freq_hz, double speed_of_sound = 343.0);
  /// (omega / c)^2
  double wavenumber_sq() const { return (omega / speed_of_sound) * (omega / speed_of_sound); }
};

struct TrainConfig {
  MlpSpec spec;
  long epochs = 100000;
  double lr = 1e-3;
  bool pde_loss_enabled = true;  ///< false gives the plain NN regression
  std::uint64_t seed = 0;
  long log_every = 1000;         ///< 0 disables the loss log
};

/// The four real-valued sub-problems of a complex field.
enum class Part { real_left = 0, real_right = 1, imag_left = 2, imag_right = 3 };
inline constexpr std::array<Part, 4> all_parts{Part::real_left, Part::real_right,
                                               Part::imag_left, Part::imag_right};
const char* part_name(Part p);
bool part_is_left(Part p);
bool part_is_real(Part p);

/// Left is y > 0; points on the y = 0 plane count as left.
inline bool is_left(const Point3& p) { return p.y >= 0.0; }

/// Points where the Helmholtz residual is enforced.
struct CollocationSet {
  std::vector<Point3> points;
};

/// Per-part training data and collocation points.
struct PartData {
  std::vector<Sample> train;
  CollocationSet colloc;
};

/// Splits known entries into the four (real/imag x left/right) training sets,
/// and all entries (known and unknown) into per-side collocation sets.
std::array<PartData, 4> split_parts(const FieldDataset& ds);

/// Target component of a pressure for a part.
double part_value(Part p, cdouble pressure);

int pinn_width_for_freq(double freq_hz);

double data_loss(const MlpParams& params, std::span<const Sample> batch);

/// Residual of the unit-balanced Helmholtz equation: lap / (omega/c)^2 + value.
inline double helmholtz_residual(double laplacian_value, double value, const PhysicsParams& phys) {
  return laplacian_value / phys.wavenumber_sq() + value;
}

/// Mean squared residual of a network at the collocation points.
double pde_loss(const MlpParams& params, const CollocationSet& colloc, const PhysicsParams& phys);

/// Value and Laplacian of an arbitrary field at a point.
struct FieldSample {
  double value = 0.0;
  double laplacian = 0.0;
};
using FieldFunction = std::function<FieldSample(const Point3&)>;

/// pde_loss for a field given in closed form.
double pde_loss(const FieldFunction& field, const CollocationSet& colloc, const PhysicsParams& phys);

struct LossRecord {
  long epoch = 0;
  double data = 0.0;
  double pde = 0.0;
  double total = 0.0;
};

struct TrainResult {
  MlpParams params;
  AdamState adam;
  std::vector<LossRecord> log;
};

/// Full-batch Adam on the data loss plus (if enabled) the Helmholtz loss.
/// Throws PreconditionError when a training point is missing from the
/// collocation set, NumericError on a non-finite loss.
TrainResult train(std::span<const Sample> data, const CollocationSet& colloc,
                  const PhysicsParams& phys, const TrainConfig& cfg);

/// Four trained networks combined into one complex predictor.
struct QuadrantModel {
  std::array<MlpParams, 4> nets;  ///< indexed by Part
  PhysicsParams phys;
  SphereGeometry geometry;
  double scale = 1.0;
};

QuadrantModel assemble(std::array<MlpParams, 4> nets, const PhysicsParams& phys,
                       const SphereGeometry& geometry, double scale);

/// Trains the four part networks of a dataset (known entries as data, all
/// entries as collocation points) on up to `jobs` threads. base.seed is
/// replaced by seeds[part].
QuadrantModel train_quadrant(const FieldDataset& ds, const TrainConfig& base,
                             const std::array<std::uint64_t, 4>& seeds,
                             double speed_of_sound = 343.0, int jobs = 1);

/// Estimates in the (normalized) units of the training data.
std::vector<cdouble> predict(const QuadrantModel& model, std::span<const Direction> dirs);

nlohmann::json quadrant_to_json(const QuadrantModel& model,
                                const std::array<std::uint64_t, 4>& seeds, long epoch);
QuadrantModel quadrant_from_json(const nlohmann::json& j);

}  // namespace helio
